//! Local solution counting: the number of zeros of a polynomial modulo
//! a prime or its square, by exhaustive enumeration and by the
//! smooth/singular Hensel split, plus common-zero counts for the
//! coprime-values setting, restriction of scalars, and the
//! t-derivative divisibility test.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arith::{mulmod_u64 as mulmod, powmod_u64 as powmod};
use crate::finite::{residues_mod, FqPoly, PrimeA};
use crate::mpoly::{FqtRing, IntRing, MPoly, Ring};
use crate::{Error, Result};

/// Default cap on the number of points an enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Hensel,
}

/// A local count `c` at one prime: the number of zeros of `f` in
/// `(R/prime^power)^arity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCount {
    /// Norm of the prime (the prime itself over the integers).
    pub prime_norm: u128,
    pub count: u128,
    pub modulus_power: u32,
    pub arity: usize,
    pub method: Method,
}

impl LocalCount {
    /// `|prime|^{modulus_power * arity}`, the size of the counted box.
    pub fn box_size(&self) -> u128 {
        self.prime_norm.pow(self.modulus_power * self.arity as u32)
    }
}

fn check_budget(need: u128, budget: Option<u128>) -> Result<()> {
    let cap = budget.unwrap_or(DEFAULT_ENUM_BUDGET);
    if need > cap {
        return Err(Error::Budget { need, budget: cap });
    }
    Ok(())
}

// ---------------------------------------------------------------------
// integer side

/// Compiled form: coefficient reduced mod `m`, exponent vector.
fn compile_z(f: &MPoly<IntRing>, m: u64) -> Vec<(u64, Vec<u32>)> {
    let mb = BigInt::from(m);
    f.terms()
        .filter_map(|(mono, c)| {
            let r = ((c % &mb) + &mb) % &mb;
            let r = r.to_u64().unwrap();
            (r != 0).then(|| (r, mono.0.clone()))
        })
        .collect()
}

/// Specialize the first variable at `v`, merging collided monomials.
fn specialize_first(terms: &[(u64, Vec<u32>)], v: u64, m: u64) -> Vec<(u64, Vec<u32>)> {
    let mut merged: HashMap<Vec<u32>, u64> = HashMap::new();
    for (c, exps) in terms {
        let scaled = mulmod(*c, powmod(v, exps[0] as u64, m), m);
        if scaled == 0 {
            continue;
        }
        let rest = exps[1..].to_vec();
        let slot = merged.entry(rest).or_insert(0);
        *slot = (*slot + scaled) % m;
    }
    merged.into_iter().filter(|&(_, c)| c != 0).map(|(e, c)| (c, e)).collect()
}

fn dense_univariate(terms: &[(u64, Vec<u32>)], m: u64) -> Vec<u64> {
    let deg = terms.iter().map(|(_, e)| e[0]).max().unwrap_or(0) as usize;
    let mut coeffs = vec![0u64; deg + 1];
    for (c, exps) in terms {
        coeffs[exps[0] as usize] = (coeffs[exps[0] as usize] + c) % m;
    }
    coeffs
}

fn horner_mod(coeffs: &[u64], x: u64, m: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (mulmod(acc, x, m) + c) % m;
    }
    acc
}

fn count_rec(terms: &[(u64, Vec<u32>)], nvars: usize, m: u64, parallel: bool) -> u128 {
    match nvars {
        0 => {
            let v: u64 = terms.iter().fold(0, |a, (c, _)| (a + c) % m);
            u128::from(v == 0)
        }
        1 => {
            let coeffs = dense_univariate(terms, m);
            if coeffs.iter().all(|&c| c == 0) {
                return m as u128;
            }
            let body = |x: u64| u128::from(horner_mod(&coeffs, x, m) == 0);
            if parallel && m > 1 << 14 {
                (0..m).into_par_iter().map(body).sum()
            } else {
                (0..m).map(body).sum()
            }
        }
        _ => {
            if terms.is_empty() {
                return (m as u128).pow(nvars as u32);
            }
            let body = |v: u64| {
                let sub = specialize_first(terms, v, m);
                count_rec(&sub, nvars - 1, m, false)
            };
            if parallel {
                (0..m).into_par_iter().map(body).sum()
            } else {
                (0..m).map(body).sum()
            }
        }
    }
}

/// Number of zeros of `f` in `(Z/p^power)^n` by full enumeration.
pub fn count_zeros_brute_z(
    f: &MPoly<IntRing>,
    p: u64,
    power: u32,
    budget: Option<u128>,
) -> Result<LocalCount> {
    let n = f.vars().len();
    let m = p
        .checked_pow(power)
        .ok_or(Error::Domain("modulus overflows".into()))?;
    check_budget((m as u128).pow(n as u32), budget)?;
    let terms = compile_z(f, m);
    let count = count_rec(&terms, n, m, true);
    Ok(LocalCount { prime_norm: p as u128, count, modulus_power: power, arity: n, method: Method::Brute })
}

/// Number of zeros of `f` in `(Z/p^2)^n` via the smooth/singular split:
/// a zero mod `p` with some partial derivative nonzero mod `p` lifts to
/// exactly `p^{n-1}` zeros mod `p^2`; at a singular zero `f` is constant
/// mod `p^2` on the fiber, so a single canonical lift decides all `p^n`.
pub fn count_zeros_hensel_z(
    f: &MPoly<IntRing>,
    p: u64,
    budget: Option<u128>,
) -> Result<LocalCount> {
    let n = f.vars().len();
    let m2 = p
        .checked_mul(p)
        .ok_or(Error::Domain("modulus overflows".into()))?;
    let mk = |count| LocalCount { prime_norm: p as u128, count, modulus_power: 2, arity: n, method: Method::Hensel };

    // closed form for a univariate affine polynomial a*x + b
    if n == 1 && f.total_degree().unwrap_or(0) <= 1 {
        let terms = compile_z(f, m2);
        let a = terms.iter().find(|(_, e)| e[0] == 1).map_or(0, |&(c, _)| c);
        let b = terms.iter().find(|(_, e)| e[0] == 0).map_or(0, |&(c, _)| c);
        // a*x = -b mod p^2 has gcd(a, p^2) solutions when that gcd
        // divides b, none otherwise
        let g = num_integer::gcd(a, m2);
        let count = if b % g == 0 { g as u128 } else { 0 };
        return Ok(mk(count));
    }

    check_budget((p as u128).pow(n as u32), budget)?;
    let terms = compile_z(f, m2);
    let grads: Vec<Vec<(u64, Vec<u32>)>> = f
        .vars()
        .iter()
        .map(|v| compile_z(&f.partial_derivative(v).unwrap(), p))
        .collect();

    // odometer over canonical representatives in {0..p-1}^n, evaluating
    // mod p^2 so the same value serves the mod-p and the lift test
    let total = (p as u128).pow(n as u32);
    let eval = |terms: &[(u64, Vec<u32>)], pt: &[u64], m: u64| -> u64 {
        let mut acc = 0u64;
        for (c, exps) in terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = mulmod(t, powmod(pt[i], e as u64, m), m);
                }
            }
            acc = (acc + t) % m;
        }
        acc
    };
    let decode = |mut idx: u128| -> Vec<u64> {
        let mut pt = vec![0u64; n];
        for slot in pt.iter_mut() {
            *slot = (idx % p as u128) as u64;
            idx /= p as u128;
        }
        pt
    };
    let (smooth, singular_hits) = (0..total)
        .into_par_iter()
        .map(|idx| {
            let pt = decode(idx);
            let v2 = eval(&terms, &pt, m2);
            if v2 % p != 0 {
                return (0u128, 0u128);
            }
            let smooth = grads.iter().any(|g| eval(g, &pt, p) != 0);
            if smooth {
                (1, 0)
            } else {
                (0, u128::from(v2 == 0))
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let count = smooth * (p as u128).pow(n as u32 - 1) + singular_hits * (p as u128).pow(n as u32);
    Ok(mk(count))
}

/// Number of common zeros of `f` and `g` in `(Z/p)^n`.
pub fn count_common_zeros_z(
    f: &MPoly<IntRing>,
    g: &MPoly<IntRing>,
    p: u64,
    budget: Option<u128>,
) -> Result<LocalCount> {
    if f.vars() != g.vars() {
        return Err(Error::Arity { expected: f.vars().len(), got: g.vars().len() });
    }
    let n = f.vars().len();
    let mk = |count| LocalCount { prime_norm: p as u128, count, modulus_power: 1, arity: n, method: Method::Brute };

    // affine pair: count = p^{n - rank} when the system is consistent
    if f.total_degree().unwrap_or(0) <= 1 && g.total_degree().unwrap_or(0) <= 1 {
        let rows: Vec<Vec<u64>> = [f, g]
            .iter()
            .map(|h| {
                let t = compile_z(h, p);
                let mut row = vec![0u64; n + 1];
                for (c, exps) in &t {
                    match exps.iter().position(|&e| e == 1) {
                        Some(i) => row[i] = *c,
                        None => row[n] = (p - *c) % p, // move constant to rhs
                    }
                }
                row
            })
            .collect();
        return Ok(mk(affine_solution_count(rows, n, p)));
    }

    check_budget((p as u128).pow(n as u32), budget)?;
    let tf = compile_z(f, p);
    let tg = compile_z(g, p);
    let total = (p as u128).pow(n as u32);
    let count = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut pt = vec![0u64; n];
            let mut k = idx;
            for slot in pt.iter_mut() {
                *slot = (k % p as u128) as u64;
                k /= p as u128;
            }
            let ev = |terms: &[(u64, Vec<u32>)]| -> u64 {
                let mut acc = 0u64;
                for (c, exps) in terms {
                    let mut t = *c;
                    for (i, &e) in exps.iter().enumerate() {
                        if e > 0 {
                            t = mulmod(t, powmod(pt[i], e as u64, p), p);
                        }
                    }
                    acc = (acc + t) % p;
                }
                acc
            };
            ev(&tf) == 0 && ev(&tg) == 0
        })
        .count() as u128;
    Ok(mk(count))
}

/// Gaussian elimination mod `p` on augmented rows `[a_1..a_n | b]` for
/// the system `a·x = b`; returns the number of solutions in `(Z/p)^n`.
fn affine_solution_count(mut rows: Vec<Vec<u64>>, n: usize, p: u64) -> u128 {
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = powmod(rows[rank][col], p - 2, p);
        for j in col..=n {
            rows[rank][j] = mulmod(rows[rank][j], inv, p);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for j in col..=n {
                    let sub = mulmod(factor, rows[rank][j], p);
                    rows[r][j] = (rows[r][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    let consistent = rows.iter().all(|r| r[..n].iter().any(|&a| a != 0) || r[n] == 0);
    if consistent {
        (p as u128).pow((n - rank) as u32)
    } else {
        0
    }
}

// ---------------------------------------------------------------------
// function-field side

/// Number of zeros of `f` in `(A/pi^power)^n` by full enumeration.
pub fn count_zeros_brute_a(
    f: &MPoly<FqtRing>,
    pi: &PrimeA,
    power: u32,
    budget: Option<u128>,
) -> Result<LocalCount> {
    let n = f.vars().len();
    let norm = pi.norm();
    check_budget(norm.pow(power).pow(n as u32), budget)?;
    let modulus = pi.generator().pow(power);
    let count = if n == 0 {
        u128::from(f.constant_value().rem(&modulus)?.is_zero())
    } else {
        residues_mod(pi, power, n)?
            .into_par_iter()
            .filter(|pt| f.evaluate(pt).unwrap().rem(&modulus).unwrap().is_zero())
            .count() as u128
    };
    Ok(LocalCount { prime_norm: norm, count, modulus_power: power, arity: n, method: Method::Brute })
}

/// Hensel-split count of zeros of `f` in `(A/pi^2)^n`.  When `f` lies in
/// `A[x_1^p, …, x_n^p]` every x-partial vanishes identically and the
/// singular-lift test switches to divisibility of the t-derivative,
/// which agrees with direct division by `pi^2` on such polynomials.
pub fn count_zeros_hensel_a(
    f: &MPoly<FqtRing>,
    pi: &PrimeA,
    budget: Option<u128>,
) -> Result<LocalCount> {
    let n = f.vars().len();
    let norm = pi.norm();
    let mk = |count| LocalCount { prime_norm: norm, count, modulus_power: 2, arity: n, method: Method::Hensel };
    if n == 0 {
        let sq = pi.generator().mul(pi.generator());
        return Ok(mk(u128::from(f.constant_value().rem(&sq)?.is_zero())));
    }
    check_budget(norm.pow(n as u32), budget)?;
    let p = f.ring().field.characteristic() as u32;
    let pure_p_powers = f
        .terms()
        .all(|(mono, _)| mono.0.iter().all(|&e| e % p == 0));
    let grads: Vec<MPoly<FqtRing>> = f
        .vars()
        .iter()
        .map(|v| f.partial_derivative(v).unwrap())
        .collect();
    let dt = f.partial_derivative("t").unwrap();
    let gen = pi.generator();
    let sq = gen.mul(gen);

    let (smooth, singular_hits) = residues_mod(pi, 1, n)?
        .into_par_iter()
        .map(|pt| {
            let v = f.evaluate(&pt).unwrap();
            if !v.rem(gen).unwrap().is_zero() {
                return (0u128, 0u128);
            }
            let is_smooth = grads
                .iter()
                .any(|g| !g.evaluate(&pt).unwrap().rem(gen).unwrap().is_zero());
            if is_smooth {
                (1, 0)
            } else if pure_p_powers {
                let d = dt.evaluate(&pt).unwrap();
                (0, u128::from(d.rem(gen).unwrap().is_zero()))
            } else {
                (0, u128::from(v.rem(&sq).unwrap().is_zero()))
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let count = smooth * norm.pow(n as u32 - 1) + singular_hits * norm.pow(n as u32);
    Ok(mk(count))
}

/// Number of common zeros of `f` and `g` in `(A/pi)^n`.
pub fn count_common_zeros_a(
    f: &MPoly<FqtRing>,
    g: &MPoly<FqtRing>,
    pi: &PrimeA,
    budget: Option<u128>,
) -> Result<LocalCount> {
    if f.vars() != g.vars() {
        return Err(Error::Arity { expected: f.vars().len(), got: g.vars().len() });
    }
    let n = f.vars().len();
    let norm = pi.norm();
    check_budget(norm.pow(n as u32), budget)?;
    let gen = pi.generator();
    let count = if n == 0 {
        u128::from(
            f.constant_value().rem(gen)?.is_zero() && g.constant_value().rem(gen)?.is_zero(),
        )
    } else {
        residues_mod(pi, 1, n)?
            .into_par_iter()
            .filter(|pt| {
                f.evaluate(pt).unwrap().rem(gen).unwrap().is_zero()
                    && g.evaluate(pt).unwrap().rem(gen).unwrap().is_zero()
            })
            .count() as u128
    };
    Ok(LocalCount { prime_norm: norm, count, modulus_power: 1, arity: n, method: Method::Brute })
}

// ---------------------------------------------------------------------
// restriction of scalars and the t-derivative criterion

/// Replace each selected variable `x_i` by
/// `y_{i0}^p + t*y_{i1}^p + … + t^{p-1}*y_{i,p-1}^p`.  Every element of
/// `A` has exactly one such expression, so zeros of the output over the
/// new variables correspond to zeros of the input.
pub fn restrict_scalars(f: &MPoly<FqtRing>, var_indices: &[usize]) -> Result<MPoly<FqtRing>> {
    let ring = f.ring().clone();
    let p = ring.field.characteristic() as usize;
    let old_vars = f.vars();
    for &i in var_indices {
        if i >= old_vars.len() {
            return Err(Error::Domain(format!("variable index {i} out of range")));
        }
    }
    let single = var_indices.len() == 1;
    let mut new_vars: Vec<String> = Vec::new();
    let mut images: Vec<Option<Vec<String>>> = vec![None; old_vars.len()];
    for (i, v) in old_vars.iter().enumerate() {
        if var_indices.contains(&i) {
            let block: Vec<String> = (0..p)
                .map(|j| if single { format!("y{j}") } else { format!("y{i}_{j}") })
                .collect();
            new_vars.extend(block.iter().cloned());
            images[i] = Some(block);
        } else {
            new_vars.push(v.clone());
        }
    }
    {
        let mut sorted = new_vars.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != new_vars.len() {
            return Err(Error::Domain("replacement variable names collide with existing ones".into()));
        }
    }
    let t = MPoly::constant(&ring, &new_vars, ring.coeff_generator());
    let map: Vec<MPoly<FqtRing>> = old_vars
        .iter()
        .enumerate()
        .map(|(i, v)| match &images[i] {
            None => {
                let idx = new_vars.iter().position(|n| n == v).unwrap();
                MPoly::var(&ring, &new_vars, idx)
            }
            Some(block) => {
                let mut acc = MPoly::zero(&ring, &new_vars);
                for (j, name) in block.iter().enumerate() {
                    let idx = new_vars.iter().position(|n| n == name).unwrap();
                    let term = MPoly::var(&ring, &new_vars, idx).pow(p as u32).mul(&t.pow(j as u32));
                    acc = acc.add(&term);
                }
                acc
            }
        })
        .collect();
    f.substitute_all(&map)
}

/// Inverse of the scalar-restriction substitution on a single element:
/// writes `a = y_0^p + t*y_1^p + … + t^{p-1}*y_{p-1}^p` and returns
/// `(y_0, …, y_{p-1})`.  Grouping the coefficients of `a` by exponent
/// residue mod `p` and taking p-th roots (the inverse Frobenius, which
/// is bijective on a finite field) makes the expression unique.
pub fn pth_power_decomposition(a: &FqPoly) -> Vec<FqPoly> {
    let field = a.field().clone();
    let p = field.characteristic() as usize;
    let e = field.extension_degree();
    let root = |c: u8| -> u8 {
        // c^(p^(e-1)): apply Frobenius e-1 times
        let mut r = c;
        for _ in 1..e {
            let mut acc = 1u8;
            for _ in 0..p {
                acc = field.mul(acc, r);
            }
            r = acc;
        }
        r
    };
    let coeffs = a.coeffs();
    (0..p)
        .map(|j| {
            let mut y = Vec::new();
            let mut k = j;
            while k < coeffs.len() {
                y.push(root(coeffs[k]));
                k += p;
            }
            FqPoly::from_coeffs(&field, y)
        })
        .collect()
}

/// For `F` a polynomial in p-th powers of its variables, tests the two
/// equivalent forms of double divisibility at the point `a`:
/// `via_square` is `pi^2 | F(a)`; `via_pair` is
/// `pi | F(a)` and `pi | (dF/dt)(a)`.
pub fn derivative_criterion(
    f: &MPoly<FqtRing>,
    pi: &PrimeA,
    point: &[FqPoly],
) -> Result<(bool, bool)> {
    let p = f.ring().field.characteristic() as u32;
    for (mono, _) in f.terms() {
        if mono.0.iter().any(|&e| e % p != 0) {
            return Err(Error::Precondition(
                "derivative criterion needs every variable exponent divisible by the characteristic".into(),
            ));
        }
    }
    let v = f.evaluate(point)?;
    let gen = pi.generator();
    let sq = gen.mul(gen);
    let via_square = v.rem(&sq)?.is_zero();
    let via_pair = v.rem(gen)?.is_zero()
        && f.partial_derivative("t")?.evaluate(point)?.rem(gen)?.is_zero();
    Ok((via_square, via_pair))
}
