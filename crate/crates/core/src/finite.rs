//! Finite fields `F_{p^e}` and the polynomial ring `A = F_q[t]`.
//!
//! Field elements are indices `0..q` encoding coefficient tuples in base
//! `p`; arithmetic goes through tables built once per field, which keeps
//! the residue-enumeration loops in `localcount` tight.

use std::fmt;
use std::sync::Arc;

use crate::arith::is_prime_u64;
use crate::{Error, Result};

/// Largest supported field order.  Every formula we compute is testable
/// at tiny `q`, and enumeration over `(A/p^2)^n` grows like `q^(2n deg p)`.
pub const MAX_FIELD_ORDER: u64 = 64;

/// Budget for residue / polynomial enumerations.
pub const ENUM_BUDGET: u128 = 100_000_000;

struct FqInner {
    p: u64,
    e: u32,
    q: u64,
    /// Monic irreducible modulus for e > 1, little-endian coefficients
    /// over F_p (length e+1); empty for prime fields.
    modulus: Vec<u64>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// The field `F_{p^e}`.  Elements are `u8` indices in `0..q`.
#[derive(Clone)]
pub struct Fq(Arc<FqInner>);

pub type FqElem = u8;

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({})", self.0.q)
    }
}

fn index_to_tuple(i: u64, p: u64, e: u32) -> Vec<u64> {
    let mut v = Vec::with_capacity(e as usize);
    let mut i = i;
    for _ in 0..e {
        v.push(i % p);
        i /= p;
    }
    v
}

fn tuple_to_index(t: &[u64], p: u64) -> u64 {
    t.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiply two F_p[x] polynomials and reduce mod a monic modulus.
fn polymulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // reduce: x^e = -(modulus without leading term)
    for i in (e..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &mj) in modulus[..e].iter().enumerate() {
            let idx = i - e + j;
            prod[idx] = (prod[idx] + c * (p - mj % p)) % p;
        }
    }
    prod.truncate(e);
    prod.resize(e, 0);
    prod
}

fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    // trial division by all monic polynomials of degree <= deg f / 2
    let d = f.len() - 1;
    for dd in 1..=(d / 2) {
        let count = p.pow(dd as u32);
        for idx in 0..count {
            let mut g = index_to_tuple(idx, p, dd as u32);
            g.push(1); // monic of degree dd
            if fp_poly_rem_is_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

fn fp_poly_rem_is_zero(f: &[u64], g: &[u64], p: u64) -> bool {
    let mut r: Vec<u64> = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - dg;
            for (j, &gj) in g.iter().enumerate() {
                let idx = shift + j;
                r[idx] = (r[idx] + lead * (p - gj % p)) % p;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

impl Fq {
    /// Prime field `F_p`.
    pub fn prime(p: u64) -> Result<Fq> {
        Fq::new(p, 1)
    }

    /// `F_{p^e}` with modulus the lexicographically first monic
    /// irreducible of degree `e` (constant coefficient most significant
    /// in the ordering).
    pub fn new(p: u64, e: u32) -> Result<Fq> {
        if !is_prime_u64(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Domain("extension degree must be >= 1".into()));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_FIELD_ORDER).ok_or_else(|| {
            Error::Domain(format!("field order p^e = {p}^{e} exceeds cap {MAX_FIELD_ORDER}"))
        })?;

        let modulus = if e == 1 {
            Vec::new()
        } else {
            let mut found = None;
            'search: for idx in 0..p.pow(e) {
                let mut cand = index_to_tuple(idx, p, e);
                cand.push(1);
                if is_irreducible_fp(&cand, p) {
                    found = Some(cand);
                    break 'search;
                }
            }
            found.expect("an irreducible of every degree exists")
        };

        let qe = q as usize;
        let mut add = vec![0u8; qe * qe];
        let mut mul = vec![0u8; qe * qe];
        let mut neg = vec![0u8; qe];
        let mut inv = vec![0u8; qe];
        for a in 0..q {
            let ta = index_to_tuple(a, p, e);
            let tn: Vec<u64> = ta.iter().map(|&c| (p - c) % p).collect();
            neg[a as usize] = tuple_to_index(&tn, p) as u8;
            for b in 0..q {
                let tb = index_to_tuple(b, p, e);
                let ts: Vec<u64> = ta.iter().zip(&tb).map(|(&x, &y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = tuple_to_index(&ts, p) as u8;
                let tm = if e == 1 {
                    vec![(ta[0] * tb[0]) % p]
                } else {
                    polymulmod(&ta, &tb, &modulus, p)
                };
                mul[(a * q + b) as usize] = tuple_to_index(&tm, p) as u8;
            }
        }
        for a in 1..q {
            for b in 1..q {
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u8;
                    break;
                }
            }
        }
        Ok(Fq(Arc::new(FqInner { p, e, q, modulus, add, mul, neg, inv })))
    }

    /// `F_q` for a prime power `q`.
    pub fn from_order(q: u64) -> Result<Fq> {
        if q < 2 {
            return Err(Error::Domain(format!("{q} is not a prime power")));
        }
        let mut p = 2;
        while p * p <= q {
            if q % p == 0 {
                let mut e = 0;
                let mut m = q;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                if m != 1 {
                    return Err(Error::Domain(format!("{q} is not a prime power")));
                }
                return Fq::new(p, e);
            }
            p += 1;
        }
        Fq::new(q, 1) // q itself prime
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }
    pub fn characteristic(&self) -> u64 {
        self.0.p
    }
    pub fn extension_degree(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        self.0.add[a as usize * self.0.q as usize + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        self.0.mul[a as usize * self.0.q as usize + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        self.0.neg[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn inv(&self, a: FqElem) -> FqElem {
        debug_assert!(a != 0);
        self.0.inv[a as usize]
    }

    /// Embedding of the prime field: `n mod p` as an element index.
    pub fn from_int(&self, n: i64) -> FqElem {
        let p = self.0.p as i64;
        (((n % p) + p) % p) as FqElem
    }

    /// Scalar multiplication by an integer (repeated addition image).
    pub fn int_mul(&self, n: i64, a: FqElem) -> FqElem {
        self.mul(self.from_int(n), a)
    }
}

/// Univariate polynomial over `F_q`, little-endian coefficients with no
/// trailing zeros; the zero polynomial has an empty coefficient vector.
#[derive(Clone)]
pub struct FqPoly {
    field: Fq,
    coeffs: Vec<FqElem>,
}

impl PartialEq for FqPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for FqPoly {}

impl std::hash::Hash for FqPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.order().hash(state);
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl FqPoly {
    pub fn zero(field: &Fq) -> FqPoly {
        FqPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(field: &Fq, c: FqElem) -> FqPoly {
        FqPoly::from_coeffs(field, vec![c])
    }

    pub fn one(field: &Fq) -> FqPoly {
        FqPoly::constant(field, 1)
    }

    /// The generator `t`.
    pub fn gen(field: &Fq) -> FqPoly {
        FqPoly::from_coeffs(field, vec![0, 1])
    }

    pub fn from_coeffs(field: &Fq, mut coeffs: Vec<FqElem>) -> FqPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqPoly { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `|a| = #(A/a) = q^deg a` for nonzero `a`; `|0| = 0`.
    pub fn norm(&self) -> u128 {
        match self.degree() {
            None => 0,
            Some(d) => (self.field.order() as u128).pow(d as u32),
        }
    }

    pub fn leading_coeff(&self) -> FqElem {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn add(&self, other: &FqPoly) -> FqPoly {
        debug_assert!(self.field == other.field);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = f.add(a, b);
        }
        FqPoly::from_coeffs(f, out)
    }

    pub fn neg(&self) -> FqPoly {
        let f = &self.field;
        FqPoly::from_coeffs(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &FqPoly) -> FqPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FqPoly) -> FqPoly {
        debug_assert!(self.field == other.field);
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        FqPoly::from_coeffs(f, out)
    }

    pub fn scale(&self, c: FqElem) -> FqPoly {
        let f = &self.field;
        FqPoly::from_coeffs(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn divrem(&self, divisor: &FqPoly) -> Result<(FqPoly, FqPoly)> {
        debug_assert!(self.field == divisor.field);
        if divisor.is_zero() {
            return Err(Error::Domain("division by zero polynomial".into()));
        }
        let f = &self.field;
        let dd = divisor.degree().unwrap();
        let lc_inv = f.inv(divisor.leading_coeff());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let lead = *rem.last().unwrap();
            if lead != 0 {
                let c = f.mul(lead, lc_inv);
                let shift = rem.len() - 1 - dd;
                quot[shift] = c;
                for (j, &gj) in divisor.coeffs.iter().enumerate() {
                    rem[shift + j] = f.sub(rem[shift + j], f.mul(c, gj));
                }
            }
            rem.pop();
        }
        Ok((FqPoly::from_coeffs(f, quot), FqPoly::from_coeffs(f, rem)))
    }

    pub fn rem(&self, modulus: &FqPoly) -> Result<FqPoly> {
        Ok(self.divrem(modulus)?.1)
    }

    pub fn make_monic(&self) -> FqPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading_coeff()))
    }

    /// Monic gcd; `gcd(a, 0) = monic(a)`.
    pub fn gcd(&self, other: &FqPoly) -> FqPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("b nonzero");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Formal `d/dt`; multiples of the characteristic collapse to zero.
    pub fn t_derivative(&self) -> FqPoly {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return FqPoly::zero(f);
        }
        let out: Vec<FqElem> = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| f.int_mul((i + 1) as i64, c))
            .collect();
        FqPoly::from_coeffs(f, out)
    }

    /// True iff `gcd(a, a')` is a unit.  Valid because `F_q` is perfect:
    /// when `a' = 0` the polynomial is a p-th power and gcd(a, 0) = a.
    pub fn is_squarefree_a(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::Domain("squarefreeness of 0 is undefined".into()));
        }
        Ok(self.gcd(&self.t_derivative()).is_unit())
    }

    pub fn pow(&self, mut e: u32) -> FqPoly {
        let mut acc = FqPoly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let e = self.field.extension_degree();
        let p = self.field.characteristic();
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff_str = if e == 1 {
                c.to_string()
            } else {
                let tup = index_to_tuple(c as u64, p, e);
                format!("[{}]", tup.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            };
            let part = match i {
                0 => coeff_str,
                1 if c == 1 && e == 1 => "t".to_string(),
                1 => format!("{coeff_str}*t"),
                _ if c == 1 && e == 1 => format!("t^{i}"),
                _ => format!("{coeff_str}*t^{i}"),
            };
            parts.push(part);
        }
        parts.join("+")
    }
}

/// A nonzero prime of `A = F_q[t]`: a monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeA {
    pi: FqPoly,
}

impl PrimeA {
    pub fn new(pi: FqPoly) -> Result<PrimeA> {
        if pi.degree().is_none() || pi.degree() == Some(0) {
            return Err(Error::Domain("a prime of A must be nonconstant".into()));
        }
        if pi.leading_coeff() != 1 {
            return Err(Error::Domain("a prime of A must be monic".into()));
        }
        if !is_irreducible(&pi)? {
            return Err(Error::Domain(format!("{} is reducible", pi.render())));
        }
        Ok(PrimeA { pi })
    }

    pub fn generator(&self) -> &FqPoly {
        &self.pi
    }

    pub fn field(&self) -> &Fq {
        self.pi.field()
    }

    pub fn degree(&self) -> usize {
        self.pi.degree().unwrap()
    }

    /// `|p| = q^deg`.
    pub fn norm(&self) -> u128 {
        self.pi.norm()
    }
}

/// Irreducibility by trial division over enumerated lower-degree
/// irreducibles; adequate at the field sizes this crate supports.
pub fn is_irreducible(f: &FqPoly) -> Result<bool> {
    let d = match f.degree() {
        None | Some(0) => return Ok(false),
        Some(d) => d,
    };
    if d == 1 {
        return Ok(true);
    }
    for dd in 1..=(d / 2) {
        for g in monic_polys_of_degree(f.field(), dd)? {
            if f.rem(&g)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn monic_polys_of_degree(field: &Fq, d: usize) -> Result<Vec<FqPoly>> {
    let q = field.order() as u128;
    let count = q.checked_pow(d as u32).ok_or(Error::Budget { need: u128::MAX, budget: ENUM_BUDGET })?;
    if count > ENUM_BUDGET {
        return Err(Error::Budget { need: count, budget: ENUM_BUDGET });
    }
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut i = idx;
        for _ in 0..d {
            coeffs.push((i % q) as FqElem);
            i /= q;
        }
        coeffs.push(1);
        out.push(FqPoly::from_coeffs(field, coeffs));
    }
    Ok(out)
}

/// All polynomials of degree `<= d`, including 0; `q^(d+1)` of them.
pub fn polys_up_to_degree(field: &Fq, d: usize) -> Result<Vec<FqPoly>> {
    let q = field.order() as u128;
    let count = q.checked_pow(d as u32 + 1).ok_or(Error::Budget { need: u128::MAX, budget: ENUM_BUDGET })?;
    if count > ENUM_BUDGET {
        return Err(Error::Budget { need: count, budget: ENUM_BUDGET });
    }
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut i = idx;
        for _ in 0..=d {
            coeffs.push((i % q) as FqElem);
            i /= q;
        }
        out.push(FqPoly::from_coeffs(field, coeffs));
    }
    Ok(out)
}

/// All monic irreducibles of degree exactly `d`.
pub fn irreducibles_of_degree(field: &Fq, d: usize) -> Result<Vec<PrimeA>> {
    if d == 0 {
        return Err(Error::Domain("irreducibles have degree >= 1".into()));
    }
    let mut out = Vec::new();
    for f in monic_polys_of_degree(field, d)? {
        if is_irreducible(&f)? {
            out.push(PrimeA { pi: f });
        }
    }
    Ok(out)
}

/// `(1/d) sum_{e | d} mu(e) q^{d/e}`.
pub fn necklace_count(q: u64, d: u64) -> u64 {
    let mut total: i128 = 0;
    for e in 1..=d {
        if d % e != 0 {
            continue;
        }
        let mu = moebius(e);
        if mu != 0 {
            total += mu as i128 * (q as i128).pow((d / e) as u32);
        }
    }
    (total / d as i128) as u64
}

fn moebius(n: u64) -> i64 {
    let mut n = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Visits `(A/pi^power)^arity` exactly once.  Residues mod `pi^2` are the
/// digit pairs `r0 + pi*r1` with `deg r_i < deg pi`.
pub fn residues_mod(pi: &PrimeA, power: u32, arity: usize) -> Result<Vec<Vec<FqPoly>>> {
    assert!(power == 1 || power == 2);
    let n = pi.norm().checked_pow(power).ok_or(Error::Budget { need: u128::MAX, budget: ENUM_BUDGET })?;
    let total = n.checked_pow(arity as u32).ok_or(Error::Budget { need: u128::MAX, budget: ENUM_BUDGET })?;
    if total > ENUM_BUDGET {
        return Err(Error::Budget { need: total, budget: ENUM_BUDGET });
    }
    let digits = polys_up_to_degree(pi.field(), pi.degree() - 1)?;
    let mut singles: Vec<FqPoly> = Vec::with_capacity(n as usize);
    if power == 1 {
        singles = digits;
    } else {
        for r1 in &digits {
            for r0 in &digits {
                singles.push(r0.add(&pi.generator().mul(r1)));
            }
        }
    }
    let mut out: Vec<Vec<FqPoly>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * singles.len());
        for tuple in &out {
            for s in &singles {
                let mut t = tuple.clone();
                t.push(s.clone());
                next.push(t);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Parse text form: `t^3+2*t+1` (prime fields) or bracketed coefficient
/// tuples like `[1,0]*t^2+[0,1]` for extensions.
pub fn parse_fqpoly(field: &Fq, text: &str) -> Result<FqPoly> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(Error::Parse { line: 1, col: 1, msg: "empty polynomial".into() });
    }
    let mut acc = FqPoly::zero(field);
    // split on +/- at top level (no parens in this grammar beyond brackets)
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = 1i64;
    let mut depth = 0;
    for (i, ch) in text.chars().enumerate() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && i > 0 && !cur.is_empty() => {
                terms.push((sign, std::mem::take(&mut cur)));
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' if depth == 0 && cur.is_empty() => {
                sign = -sign;
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        terms.push((sign, cur));
    }
    for (sgn, term) in terms {
        let mut coeff: FqElem = 1;
        let mut deg = 0usize;
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse { line: 1, col: 1, msg: format!("malformed term {term:?}") });
            }
            if let Some(rest) = factor.strip_prefix('t') {
                deg += if rest.is_empty() {
                    1
                } else {
                    let exp = rest.strip_prefix('^').ok_or_else(|| Error::Parse {
                        line: 1,
                        col: 1,
                        msg: format!("bad factor {factor:?}"),
                    })?;
                    exp.parse::<usize>().map_err(|_| Error::Parse {
                        line: 1,
                        col: 1,
                        msg: format!("bad exponent {exp:?}"),
                    })?
                };
            } else if let Some(body) = factor.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let tup: Vec<u64> = body
                    .split(',')
                    .map(|s| s.parse::<u64>().map(|v| v % field.characteristic()))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse { line: 1, col: 1, msg: format!("bad tuple {factor:?}") })?;
                if tup.len() != field.extension_degree() as usize {
                    return Err(Error::Parse {
                        line: 1,
                        col: 1,
                        msg: format!("tuple length {} != extension degree", tup.len()),
                    });
                }
                coeff = field.mul(coeff, tuple_to_index(&tup, field.characteristic()) as FqElem);
            } else {
                let v = factor.parse::<i64>().map_err(|_| Error::Parse {
                    line: 1,
                    col: 1,
                    msg: format!("bad coefficient {factor:?}"),
                })?;
                coeff = field.mul(coeff, field.from_int(v));
            }
        }
        if sgn < 0 {
            coeff = field.neg(coeff);
        }
        let mut mono = vec![0; deg + 1];
        mono[deg] = coeff;
        acc = acc.add(&FqPoly::from_coeffs(field, mono));
    }
    Ok(acc)
}
