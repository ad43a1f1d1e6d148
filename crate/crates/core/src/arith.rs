//! Exact integer arithmetic: prime sieve, deterministic factorization,
//! squarefree kernel extraction.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

use crate::{Error, Result};

/// Hard cap on the sieve size so a typo cannot allocate the machine away.
const SIEVE_BUDGET: u64 = 1 << 31;

/// Trial division bound used before switching to Pollard-Brent rho.
const TRIAL_BOUND: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// `(prime, exponent)` with primes strictly increasing, exponents >= 1.
    pub prime_powers: Vec<(BigInt, u32)>,
    pub sign: i8,
}

impl Factorization {
    /// Reconstructs the factored integer.
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for (p, e) in &self.prime_powers {
            acc *= p.pow(*e);
        }
        acc
    }
}

/// `input = kernel * root^2` with `kernel` squarefree and sign-carrying.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeSplit {
    pub kernel: BigInt,
    pub root: BigInt,
}

/// All primes `<= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::Domain(format!("primes_up_to requires limit >= 2, got {limit}")));
    }
    if limit > SIEVE_BUDGET {
        return Err(Error::Budget { need: limit as u128, budget: SIEVE_BUDGET as u128 });
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    Ok(primes)
}

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(TRIAL_BOUND).expect("static sieve"))
}

#[inline]
pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Witness set valid for all n below 3.3 * 10^24; in particular
/// deterministic for every u64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_big(n: &BigUint) -> bool {
    if let Some(u) = n.to_u64() {
        return is_prime_u64(u);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &MR_WITNESSES {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho with a fixed increment schedule, so the
/// factor found depends only on `n`.
fn brent_rho_u64(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 != 0);
    const BLOCK: u64 = 128;
    for c in 1u64.. {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = mulmod_u64(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == n {
            // gcd collapsed inside a block; replay one step at a time
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
            }
        }
        if g != n {
            return g;
        }
        // degenerate cycle for this increment; try the next one
    }
    unreachable!("composite n must yield a factor")
}

fn brent_rho_big(n: &BigUint) -> BigUint {
    for c in 1u64.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u64);
        let mut y = x.clone();
        loop {
            x = f(&x);
            y = f(&f(&y));
            if x == y {
                break; // cycle without factor; next c
            }
            let diff = if x > y { &x - &y } else { &y - &x };
            let g = diff.gcd(n);
            if g > BigUint::one() {
                if &g < n {
                    return g;
                }
                break;
            }
        }
    }
    unreachable!("composite n must yield a factor")
}

fn factor_u64_into(n: u64, out: &mut Vec<(u64, u32)>) {
    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if m == 1 {
        return;
    }
    if is_prime_u64(m) {
        out.push((m, 1));
        return;
    }
    // composite cofactor with all prime factors > TRIAL_BOUND
    let mut stack = vec![m];
    let mut found: Vec<u64> = Vec::new();
    while let Some(k) = stack.pop() {
        if is_prime_u64(k) {
            found.push(k);
            continue;
        }
        let d = brent_rho_u64(k);
        stack.push(d);
        stack.push(k / d);
    }
    found.sort_unstable();
    let mut i = 0;
    while i < found.len() {
        let p = found[i];
        let mut e = 0;
        while i < found.len() && found[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
}

fn factor_big(n: &BigUint) -> Vec<(BigUint, u32)> {
    if let Some(u) = n.to_u64() {
        let mut small = Vec::new();
        factor_u64_into(u, &mut small);
        return small.into_iter().map(|(p, e)| (BigUint::from(p), e)).collect();
    }
    let mut m = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if (&m).to_u64().map_or(false, |u| p * p > u) {
            break;
        }
        if (&m % &pb).is_zero() {
            let mut e = 0;
            while (&m % &pb).is_zero() {
                m /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
    }
    if m.is_one() {
        return out;
    }
    let mut stack = vec![m];
    let mut found: Vec<BigUint> = Vec::new();
    while let Some(k) = stack.pop() {
        if let Some(u) = k.to_u64() {
            let mut small = Vec::new();
            factor_u64_into(u, &mut small);
            for (p, e) in small {
                for _ in 0..e {
                    found.push(BigUint::from(p));
                }
            }
            continue;
        }
        if is_prime_big(&k) {
            found.push(k);
            continue;
        }
        let d = brent_rho_big(&k);
        stack.push(&k / &d);
        stack.push(d);
    }
    found.sort();
    let mut i = 0;
    while i < found.len() {
        let p = found[i].clone();
        let mut e = 0;
        while i < found.len() && found[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out
}

pub fn factorize(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Domain("factorize(0) is undefined".into()));
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mag = n.magnitude();
    let prime_powers = if mag.is_one() {
        Vec::new()
    } else {
        factor_big(mag)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect()
    };
    Ok(Factorization { prime_powers, sign })
}

pub fn squarefree_split(n: &BigInt) -> Result<SquarefreeSplit> {
    let fact = factorize(n)?;
    let mut kernel = BigInt::from(fact.sign);
    let mut root = BigInt::one();
    for (p, e) in &fact.prime_powers {
        if e % 2 == 1 {
            kernel *= p;
        }
        root *= p.pow(e / 2);
    }
    Ok(SquarefreeSplit { kernel, root })
}

/// Squarefree test; `0` is not squarefree.
///
/// Fast path for `|n| < 2^64`: trial divide by p while p^3 <= cofactor,
/// then the cofactor is 1, prime, a prime square, or a product of two
/// distinct primes, each of which is decided without further factoring.
pub fn is_squarefree(n: &BigInt) -> bool {
    if n.is_zero() {
        return false;
    }
    if let Some(u) = n.magnitude().to_u64() {
        return is_squarefree_u64(u);
    }
    factorize(n)
        .map(|f| f.prime_powers.iter().all(|(_, e)| *e == 1))
        .unwrap_or(false)
}

pub fn is_squarefree_u64(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut table_exhausted = true;
    for &p in small_primes() {
        if p * p * p > m {
            table_exhausted = false;
            break;
        }
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
    }
    if m == 1 {
        return true;
    }
    if table_exhausted && TRIAL_BOUND.pow(3) <= m {
        // cofactor too large for the three-factor argument
        let mut fact = Vec::new();
        factor_u64_into(m, &mut fact);
        return fact.iter().all(|(_, e)| *e == 1);
    }
    // m has no prime factor p with p^3 <= m, so m has at most two
    // (not necessarily distinct) prime factors
    let r = m.isqrt();
    if r * r == m {
        return false;
    }
    true
}
