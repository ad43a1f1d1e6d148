//! Univariate polynomials over `Z` and over `A = F_q[t]`, with the gcd
//! machinery (primitive pseudo-remainder sequences) that backs Yun
//! decomposition and the randomized squarefreeness guard.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::finite::{Fq, FqPoly};

/// Integer univariate polynomial, little-endian, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> ZPoly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn zero() -> ZPoly {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> ZPoly {
        ZPoly::new(vec![c])
    }

    pub fn from_i64(coeffs: &[i64]) -> ZPoly {
        ZPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            out.push(a + b);
        }
        ZPoly::new(out)
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> ZPoly {
        if self.coeffs.len() <= 1 {
            return ZPoly::zero();
        }
        ZPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i + 1))
                .collect(),
        )
    }

    /// gcd of the coefficients, as a nonnegative integer (0 for the zero
    /// polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Content removed, leading coefficient made positive.
    pub fn primitive_part(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut g = self.content();
        if self.leading_coeff().is_negative() {
            g = -g;
        }
        ZPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact division; panics if not exact (internal use on known-exact cases).
    pub fn div_exact(&self, divisor: &ZPoly) -> ZPoly {
        let (q, r) = self.pseudo_divrem_exactish(divisor);
        assert!(r.is_zero(), "division not exact");
        q
    }

    /// Ordinary polynomial division valid when it happens to be exact over Z
    /// at every step; returns (quotient, remainder over Q scaled away).
    fn pseudo_divrem_exactish(&self, divisor: &ZPoly) -> (ZPoly, ZPoly) {
        let dd = divisor.degree().expect("nonzero divisor");
        let lc = divisor.leading_coeff();
        let mut rem = self.clone();
        let mut quot = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.degree().map_or(false, |d| d >= dd) {
            let d = rem.degree().unwrap();
            let (q, r) = rem.leading_coeff().div_rem(&lc);
            assert!(r.is_zero(), "leading coefficient does not divide");
            quot[d - dd] = q.clone();
            let mut shifted = vec![BigInt::zero(); d - dd];
            shifted.extend(divisor.coeffs.iter().map(|c| c * &q));
            rem = rem.sub(&ZPoly::new(shifted));
        }
        (ZPoly::new(quot), rem)
    }

    /// Pseudo-remainder: `lc(g)^(deg f - deg g + 1) * f mod g`.
    fn pseudo_rem(&self, divisor: &ZPoly) -> ZPoly {
        let dd = divisor.degree().expect("nonzero divisor");
        let lc = divisor.leading_coeff();
        let mut rem = self.clone();
        while rem.degree().map_or(false, |d| d >= dd) {
            let d = rem.degree().unwrap();
            let r_lc = rem.leading_coeff();
            rem = rem.scale(&lc);
            let mut shifted = vec![BigInt::zero(); d - dd];
            shifted.extend(divisor.coeffs.iter().map(|c| c * &r_lc));
            rem = rem.sub(&ZPoly::new(shifted));
        }
        rem
    }

    /// Primitive gcd over Z (gcd over Q up to rational multiples, scaled by
    /// the gcd of contents).
    pub fn gcd(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content().gcd(&self.content())).primitive_positive();
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content().gcd(&other.content())).primitive_positive();
        }
        let content_gcd = self.content().gcd(&other.content());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part().scale(&content_gcd).primitive_positive()
    }

    fn primitive_positive(&self) -> ZPoly {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Squarefree over Q: gcd(f, f') is constant.
    pub fn is_squarefree_q(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.primitive_part().gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Yun's squarefree factorization of a primitive polynomial with
    /// positive leading coefficient: returns `a_1, a_2, ...` with
    /// `f = prod a_i^i`, each `a_i` squarefree and pairwise coprime.
    pub fn yun(&self) -> Vec<ZPoly> {
        let f = self.primitive_part();
        if f.degree().map_or(true, |d| d == 0) {
            return Vec::new();
        }
        let fp = f.derivative();
        let g = f.gcd(&fp);
        let mut out = Vec::new();
        if g.degree() == Some(0) {
            out.push(f);
            return out;
        }
        let mut c = f.div_exact(&g);
        let mut d = fp.div_exact(&g).sub(&c.derivative());
        loop {
            let a = c.gcd(&d).primitive_part();
            c = c.div_exact(&a);
            let d_next = d.div_exact(&a);
            out.push(a);
            if c.degree() == Some(0) {
                break;
            }
            d = d_next.sub(&c.derivative());
        }
        out
    }

    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match i {
                0 => c.to_string(),
                1 if c.is_one() => var.to_string(),
                1 => format!("{c}*{var}"),
                _ if c.is_one() => format!("{var}^{i}"),
                _ => format!("{c}*{var}^{i}"),
            };
            parts.push(body);
        }
        parts.join("+").replace("+-", "-")
    }
}

/// Univariate polynomial with coefficients in `A = F_q[t]`; gcds are taken
/// over the fraction field `K = F_q(t)` via a primitive pseudo-remainder
/// sequence, with content in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPoly {
    field: Fq,
    coeffs: Vec<FqPoly>,
}

impl KPoly {
    pub fn new(field: &Fq, mut coeffs: Vec<FqPoly>) -> KPoly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        KPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Fq) -> KPoly {
        KPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FqPoly] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> FqPoly {
        self.coeffs.last().cloned().unwrap_or_else(|| FqPoly::zero(&self.field))
    }

    pub fn sub(&self, other: &KPoly) -> KPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(|| FqPoly::zero(&self.field));
            let b = other.coeffs.get(i).cloned().unwrap_or_else(|| FqPoly::zero(&self.field));
            out.push(a.sub(&b));
        }
        KPoly::new(&self.field, out)
    }

    pub fn scale(&self, c: &FqPoly) -> KPoly {
        KPoly::new(&self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Formal d/dx.
    pub fn x_derivative(&self) -> KPoly {
        if self.coeffs.len() <= 1 {
            return KPoly::zero(&self.field);
        }
        let out: Vec<FqPoly> = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.field.from_int((i + 1) as i64);
                c.scale(k)
            })
            .collect();
        KPoly::new(&self.field, out)
    }

    /// Coefficient-wise d/dt.
    pub fn t_derivative(&self) -> KPoly {
        KPoly::new(&self.field, self.coeffs.iter().map(|c| c.t_derivative()).collect())
    }

    /// Monic-in-A gcd of the coefficients.
    pub fn content(&self) -> FqPoly {
        let mut g = FqPoly::zero(&self.field);
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn primitive_part(&self) -> KPoly {
        if self.is_zero() {
            return self.clone();
        }
        let g = self.content();
        KPoly::new(
            &self.field,
            self.coeffs.iter().map(|c| c.divrem(&g).expect("content divides").0).collect(),
        )
    }

    fn pseudo_rem(&self, divisor: &KPoly) -> KPoly {
        let dd = divisor.degree().expect("nonzero divisor");
        let lc = divisor.leading_coeff();
        let mut rem = self.clone();
        while rem.degree().map_or(false, |d| d >= dd) {
            let d = rem.degree().unwrap();
            let r_lc = rem.leading_coeff();
            rem = rem.scale(&lc);
            let mut shifted = vec![FqPoly::zero(&self.field); d - dd];
            shifted.extend(divisor.coeffs.iter().map(|c| c.mul(&r_lc)));
            rem = rem.sub(&KPoly::new(&self.field, shifted));
        }
        rem
    }

    /// gcd over K[x], returned primitive over A.
    pub fn gcd(&self, other: &KPoly) -> KPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> ZPoly {
        ZPoly::from_i64(c)
    }

    #[test]
    fn gcd_examples() {
        // gcd(x^2-1, x^2-2x+1) = x-1
        let g = zp(&[-1, 0, 1]).gcd(&zp(&[1, -2, 1]));
        assert_eq!(g, zp(&[-1, 1]));
        // coprime
        let g = zp(&[1, 0, 1]).gcd(&zp(&[1, 1]));
        assert_eq!(g.degree(), Some(0));
    }

    #[test]
    fn squarefree_q() {
        assert!(zp(&[1, 0, 1]).is_squarefree_q()); // x^2+1
        assert!(!zp(&[0, 0, 1]).is_squarefree_q()); // x^2
        assert!(!zp(&[1, 2, 1]).is_squarefree_q()); // (x+1)^2
        assert!(zp(&[0, 4]).is_squarefree_q()); // 4x, squarefree over Q
    }

    #[test]
    fn yun_splits_multiplicities() {
        // x(x+1)^2 = x^3+2x^2+x
        let f = zp(&[0, 1, 2, 1]);
        let parts = f.yun();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], zp(&[0, 1])); // x
        assert_eq!(parts[1], zp(&[1, 1])); // x+1
        // reconstruct
        let mut acc = ZPoly::constant(BigInt::from(1));
        for (i, a) in parts.iter().enumerate() {
            for _ in 0..=i {
                acc = acc.mul(a);
            }
        }
        assert_eq!(acc, f);
    }

    #[test]
    fn yun_on_random_products() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(11);
        for _ in 0..100 {
            // build f = a * b^2 with small random a, b
            let a = zp(&[rng.gen_range(1..6), rng.gen_range(1..4), 1]);
            let b = zp(&[rng.gen_range(1..5), 1]);
            let f = a.mul(&b).mul(&b);
            let parts = f.yun();
            let mut acc = ZPoly::constant(f.content());
            for (i, part) in parts.iter().enumerate() {
                for _ in 0..=i {
                    acc = acc.mul(part);
                }
            }
            assert_eq!(acc.primitive_part(), f.primitive_part());
        }
    }

    #[test]
    fn kpoly_gcd_over_a() {
        let field = Fq::prime(2).unwrap();
        let t = FqPoly::gen(&field);
        let one = FqPoly::one(&field);
        // f = (x + t)(x + 1), g = (x + t)(x + t + 1): gcd = x + t
        let xt = KPoly::new(&field, vec![t.clone(), one.clone()]);
        let x1 = KPoly::new(&field, vec![one.clone(), one.clone()]);
        let xt1 = KPoly::new(&field, vec![t.add(&one), one.clone()]);
        let f = mul_kpoly(&xt, &x1);
        let g = mul_kpoly(&xt, &xt1);
        let got = f.gcd(&g);
        assert_eq!(got.degree(), Some(1));
        assert_eq!(got.coeffs()[0], t);
    }

    fn mul_kpoly(a: &KPoly, b: &KPoly) -> KPoly {
        let field = a.field.clone();
        let mut out = vec![FqPoly::zero(&field); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        KPoly::new(&field, out)
    }
}
