//! Square classes of polynomial values: the canonical `f = c*g^2*h`
//! decomposition, the `delta_r` table and the constant `c_f`, counting
//! the image of `f(1..B)` in the square classes of the rationals
//! (with 0 its own class), and the Pell-type collision counter.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize, squarefree_split};
use crate::unipoly::ZPoly;
use crate::{Error, Result};

/// Canonical splitting `f = c * g^2 * h` with `g`, `h` primitive with
/// positive leading coefficients and `h` squarefree.
#[derive(Clone, Debug, PartialEq)]
pub struct SquarefreeDecomposition {
    pub c: BigInt,
    pub g: ZPoly,
    pub h: ZPoly,
}

/// Split off the largest square polynomial factor.  Constants move into
/// `c`, so the result is canonical even though the raw splitting is not.
pub fn squarefree_decompose(f: &ZPoly) -> Result<SquarefreeDecomposition> {
    if f.is_zero() {
        return Err(Error::Domain("cannot decompose the zero polynomial".into()));
    }
    if f.degree() == Some(0) {
        return Ok(SquarefreeDecomposition {
            c: f.leading_coeff(),
            g: ZPoly::constant(BigInt::one()),
            h: ZPoly::constant(BigInt::one()),
        });
    }
    // f = sign*content * prod a_i^i with the a_i primitive, squarefree,
    // pairwise coprime; odd multiplicities assemble h, the rest g
    let parts = f.yun();
    let mut g = ZPoly::constant(BigInt::one());
    let mut h = ZPoly::constant(BigInt::one());
    for (idx, a) in parts.iter().enumerate() {
        let mult = idx + 1;
        for _ in 0..mult / 2 {
            g = g.mul(a);
        }
        if mult % 2 == 1 {
            h = h.mul(a);
        }
    }
    let mut c = f.content();
    if f.leading_coeff().is_negative() {
        c = -c;
    }
    Ok(SquarefreeDecomposition { c, g, h })
}

/// The table of `delta_r = 1/m^2` for the minimal positive `m` with
/// `m^2 r = b (mod a)`, zero when no such `m` exists.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTable {
    pub a: u64,
    /// `entries[r]` is the minimal witness `m` (so `delta_r = 1/m^2`),
    /// or `None` when `delta_r = 0`.
    pub entries: Vec<Option<u64>>,
}

impl DeltaTable {
    /// `sum_r delta_r` as an exact rational.
    pub fn delta_sum(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for m in self.entries.iter().flatten() {
            acc += BigRational::new(BigInt::one(), BigInt::from(m * m));
        }
        acc
    }
}

/// Exhaustive scan `m = 1..a` for every residue `r`.  Witnesses `m`
/// repeat with period `a`, so the scan is complete.
pub fn delta_table(a: u64, b: i64) -> Result<DeltaTable> {
    if a == 0 {
        return Err(Error::Domain("the modulus a must be positive".into()));
    }
    let bm = b.rem_euclid(a as i64) as u64;
    let entries = (0..a)
        .map(|r| (1..=a).find(|&m| (m as u128 * m as u128 * r as u128) % a as u128 == bm as u128))
        .collect();
    Ok(DeltaTable { a, entries })
}

/// The limiting image-size constant `c_f` of a univariate polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct CfConstant {
    /// Degree of `h` in the decomposition: the case selector.
    pub deg_h: usize,
    /// Numeric value of `c_f`.
    pub value: f64,
    /// Set in the linear case: the exact rational `s` with
    /// `c_f = s / pi^2` (combining `6/pi^2`, the delta sum, and the
    /// local corrections at primes dividing the leading coefficient).
    pub pi_squared_multiple: Option<BigRational>,
}

/// `c_f = 0` when `h` is constant, `1` when `deg h >= 2`, and
/// `(6/pi^2)(sum_r delta_r) prod_{p | a}(1 - p^-2)^{-1}` for `h = a*x+b`.
pub fn c_f_constant(f: &ZPoly) -> Result<CfConstant> {
    let dec = squarefree_decompose(f)?;
    let deg_h = dec.h.degree().unwrap_or(0);
    match deg_h {
        0 => Ok(CfConstant { deg_h, value: 0.0, pi_squared_multiple: None }),
        1 => {
            let a = dec.h.leading_coeff().to_u64().expect("h has positive leading coefficient");
            let b = dec.h.eval(&BigInt::zero()).to_i64().ok_or_else(|| {
                Error::Domain("constant term of h out of range".into())
            })?;
            let table = delta_table(a, b)?;
            let mut s = BigRational::from(BigInt::from(6)) * table.delta_sum();
            for (p, _) in &factorize(&BigInt::from(a))?.prime_powers {
                // (1 - p^-2)^{-1} = p^2/(p^2 - 1)
                let p2 = p * p;
                s *= BigRational::new(p2.clone(), &p2 - BigInt::one());
            }
            let value = s.to_f64().unwrap() / (std::f64::consts::PI * std::f64::consts::PI);
            Ok(CfConstant { deg_h, value, pi_squared_multiple: Some(s) })
        }
        _ => Ok(CfConstant { deg_h, value: 1.0, pi_squared_multiple: None }),
    }
}

/// Image of `f(1..B)` in the square classes.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageCount {
    pub distinct: u64,
    pub ratio: f64,
    /// Checkpoints `(B', distinct so far, ratio)` when requested.
    pub per_prefix: Option<Vec<(u64, u64, f64)>>,
}

/// Count distinct square classes among `f(1), …, f(B)`.  The class of a
/// nonzero value is its signed squarefree kernel; 0 is its own class.
/// `prefix_stride` records the running count every that many steps.
pub fn image_count(f: &ZPoly, b: u64, prefix_stride: Option<u64>) -> Result<ImageCount> {
    if b == 0 {
        return Err(Error::Domain("the bound B must be positive".into()));
    }
    let mut seen: HashSet<BigInt> = HashSet::new();
    let mut curve = prefix_stride.map(|_| Vec::new());
    for x in 1..=b {
        let v = f.eval(&BigInt::from(x));
        let key = if v.is_zero() { BigInt::zero() } else { squarefree_split(&v)?.kernel };
        seen.insert(key);
        if let (Some(curve), Some(stride)) = (curve.as_mut(), prefix_stride) {
            if x % stride == 0 || x == b {
                curve.push((x, seen.len() as u64, seen.len() as f64 / x as f64));
            }
        }
    }
    Ok(ImageCount {
        distinct: seen.len() as u64,
        ratio: seen.len() as f64 / b as f64,
        per_prefix: curve,
    })
}

/// Count pairs `1 <= m, n <= B` with `f(m) = q * f(n)` for a fixed
/// rational `q != 1`, by hashing the left side and streaming the right.
pub fn collision_count(f: &ZPoly, qratio: &BigRational, b: u64) -> Result<u64> {
    if f.degree().unwrap_or(0) < 2 {
        return Err(Error::Precondition("collision counting needs deg f >= 2".into()));
    }
    if !f.is_squarefree_q() {
        return Err(Error::Precondition("collision counting needs squarefree f".into()));
    }
    if qratio.is_one() {
        return Err(Error::Precondition("the ratio q must differ from 1".into()));
    }
    let qn = qratio.numer();
    let qd = qratio.denom();
    // f(m) = (qn/qd) f(n)  <=>  qd*f(m) = qn*f(n)
    let mut left: HashMap<BigInt, u64> = HashMap::new();
    for m in 1..=b {
        *left.entry(qd * f.eval(&BigInt::from(m))).or_insert(0) += 1;
    }
    let mut count = 0u64;
    for n in 1..=b {
        if let Some(k) = left.get(&(qn * f.eval(&BigInt::from(n)))) {
            count += k;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn zpoly(coeffs: &[i64]) -> ZPoly {
        ZPoly::from_i64(coeffs)
    }

    #[test]
    fn decomposition_examples() {
        // x^3 + 2x^2 + x = x (x+1)^2
        let d = squarefree_decompose(&zpoly(&[0, 1, 2, 1])).unwrap();
        assert_eq!(d.c, BigInt::one());
        assert_eq!(d.g, zpoly(&[1, 1]));
        assert_eq!(d.h, zpoly(&[0, 1]));
        // 4x^3 + 4x^2 = 4 x^2 (x+1)
        let d = squarefree_decompose(&zpoly(&[0, 0, 4, 4])).unwrap();
        assert_eq!(d.c, BigInt::from(4));
        assert_eq!(d.g, zpoly(&[0, 1]));
        assert_eq!(d.h, zpoly(&[1, 1]));
        // constants
        let d = squarefree_decompose(&zpoly(&[7])).unwrap();
        assert_eq!(d.c, BigInt::from(7));
        assert_eq!(d.g, zpoly(&[1]));
        assert_eq!(d.h, zpoly(&[1]));
        assert!(squarefree_decompose(&ZPoly::zero()).is_err());
    }

    #[test]
    fn decomposition_reconstructs_random_products() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(42);
        for _ in 0..200 {
            let deg = rng.gen_range(0..=8usize);
            let mut coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
            if coeffs.iter().all(|&c| c == 0) {
                coeffs[0] = 1;
            }
            let f = zpoly(&coeffs);
            let d = squarefree_decompose(&f).unwrap();
            let back = d.g.mul(&d.g).mul(&d.h).scale(&d.c);
            assert_eq!(back, f, "f = {}", f.render("x"));
            assert!(d.h.is_zero() || d.h.degree() == Some(0) || d.h.is_squarefree_q());
            assert_eq!(d.h.content(), BigInt::one());
            assert!(d.h.leading_coeff().is_positive());
        }
    }

    #[test]
    fn delta_table_examples() {
        let t = delta_table(4, 1).unwrap();
        assert_eq!(t.entries, vec![None, Some(1), None, None]);
        assert_eq!(t.delta_sum(), BigRational::from(BigInt::one()));
        let t = delta_table(1, 0).unwrap();
        assert_eq!(t.entries, vec![Some(1)]);
        let t = delta_table(2, 1).unwrap();
        assert_eq!(t.entries, vec![None, Some(1)]);
        // nonzero entries only at r prime to a
        let t = delta_table(4, 1).unwrap();
        for (r, e) in t.entries.iter().enumerate() {
            if e.is_some() {
                assert_eq!(num_integer::gcd(r as u64, 4), 1);
            }
        }
    }

    #[test]
    fn c_f_cases() {
        // h constant
        let c = c_f_constant(&zpoly(&[0, 0, 2])).unwrap();
        assert_eq!(c.deg_h, 0);
        assert_eq!(c.value, 0.0);
        // deg h >= 2
        let c = c_f_constant(&zpoly(&[1, 0, 1])).unwrap();
        assert_eq!(c.value, 1.0);
        // linear: f = 4x + 1 -> 8/pi^2
        let c = c_f_constant(&zpoly(&[1, 4])).unwrap();
        assert_eq!(c.pi_squared_multiple, Some(BigRational::from(BigInt::from(8))));
        let expected = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((c.value - expected).abs() < 1e-12);
    }

    #[test]
    fn image_count_examples() {
        let ic = image_count(&zpoly(&[0, 1]), 100, None).unwrap();
        assert_eq!(ic.distinct, 61); // squarefree integers up to 100
        let ic = image_count(&zpoly(&[0, 0, 1]), 100, None).unwrap();
        assert_eq!(ic.distinct, 1); // all perfect squares
        let ic = image_count(&zpoly(&[0, -1, 1]), 1, None).unwrap();
        assert_eq!(ic.distinct, 1); // f(1) = 0, the zero class
        // prefix curve is monotone in distinct counts
        let ic = image_count(&zpoly(&[1, 4]), 1000, Some(100)).unwrap();
        let curve = ic.per_prefix.unwrap();
        assert_eq!(curve.len(), 10);
        assert!(curve.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn image_ratio_converges_to_c_f() {
        let f = zpoly(&[1, 4]);
        let cf = c_f_constant(&f).unwrap();
        let ic = image_count(&f, 200_000, None).unwrap();
        assert!((ic.ratio - cf.value).abs() < 0.01, "{} vs {}", ic.ratio, cf.value);
    }

    #[test]
    fn pell_collisions() {
        let f = zpoly(&[1, 0, 1]);
        let two = BigRational::from(BigInt::from(2));
        assert_eq!(collision_count(&f, &two, 100).unwrap(), 3);
        let minus_one = BigRational::from(BigInt::from(-1));
        assert_eq!(collision_count(&f, &minus_one, 100).unwrap(), 0);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(collision_count(&f, &half, 100).unwrap(), 3);
        // o(B): the collision ratio decreases across growing bounds
        let mut prev = f64::INFINITY;
        for b in [100u64, 1000, 10_000] {
            let ratio = collision_count(&f, &two, b).unwrap() as f64 / b as f64;
            assert!(ratio < prev);
            prev = ratio;
        }
        // preconditions
        assert!(collision_count(&zpoly(&[1, 1]), &two, 10).is_err());
        assert!(collision_count(&zpoly(&[0, 0, 1]), &two, 10).is_err());
        assert!(collision_count(&f, &BigRational::from(BigInt::one()), 10).is_err());
    }
}
