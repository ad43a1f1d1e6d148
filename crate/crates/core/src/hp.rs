//! Double-double arithmetic: an unevaluated sum of two `f64`s giving
//! roughly 106 bits of mantissa.  Euler products multiply up to ~10^5
//! factors each within 10^-6 of 1, which is beyond what plain `f64`
//! keeps at the tolerances we target.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion (u128 has at most 128 significant bits; we feed
    /// it in 32-bit limbs so every intermediate step is exact).
    pub fn from_u128(n: u128) -> Dd {
        let mut acc = Dd::ZERO;
        for shift in [96u32, 64, 32, 0] {
            let limb = ((n >> shift) & 0xffff_ffff) as u32;
            acc = acc.mul_f64(4294967296.0).add(Dd::from_f64(limb as f64));
        }
        acc
    }

    #[inline]
    pub fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, b: Dd) -> Dd {
        self.add(Dd { hi: -b.hi, lo: -b.lo })
    }

    #[inline]
    pub fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        self.mul(Dd::from_f64(b))
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_f64(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_f64(q2));
        let q3 = r.hi / b.hi;
        Dd::from_f64(q1).add(Dd::from_f64(q2)).add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u128_round_trip() {
        for n in [0u128, 1, 2, u64::MAX as u128, 1 << 100, 23u128.pow(12)] {
            let d = Dd::from_u128(n);
            // values up to 2^106 convert exactly
            if n < (1u128 << 106) {
                let back = d.hi as u128;
                let rem = d.lo;
                assert_eq!(back as i128 + rem as i128, n as i128, "n={n}");
            }
        }
    }

    #[test]
    fn product_of_near_one_factors() {
        // prod (1 - 1/k^2) for k=2..N telescopes to (N+1)/(2N)
        let n = 100_000u64;
        let mut acc = Dd::ONE;
        for k in 2..=n {
            let f = Dd::ONE.sub(Dd::ONE.div(Dd::from_u128((k as u128) * (k as u128))));
            acc = acc.mul(f);
        }
        let exact = (n as f64 + 1.0) / (2.0 * n as f64);
        assert!((acc.to_f64() - exact).abs() < 1e-14);
    }
}
