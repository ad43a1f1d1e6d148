//! Squarefree discriminants of `y^2 = x^3 + A*x + B` over `F_q[t]`:
//! the local double-zero density `(2N^2 - N)/N^4` at points of the
//! projective line, the constant `gamma_q`, the `R_d` limit formula,
//! and the matching empirical density over bounded-degree pairs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::density::{
    empirical_density_a, euler_product, BoxSpec, DensityEstimate, EulerProduct, Mode, PredicateA,
    Regime, TailModel,
};
use crate::finite::{irreducibles_of_degree, Fq, PrimeA};
use crate::localcount::{count_zeros_hensel_a, LocalCount, Method};
use crate::mpoly::{parse, FqtRing, MPoly};
use crate::{Error, Result};

/// A closed point of the projective line over `F_q`.
#[derive(Clone, Debug, PartialEq)]
pub enum P1Point {
    Finite(PrimeA),
    /// The point at infinity, of degree 1.
    Infinity { q: u64 },
}

impl P1Point {
    pub fn norm(&self) -> u128 {
        match self {
            P1Point::Finite(pi) => pi.norm(),
            P1Point::Infinity { q } => *q as u128,
        }
    }
}

fn check_char(q: u64) -> Result<()> {
    if q % 2 == 0 || q % 3 == 0 {
        return Err(Error::Precondition(
            "the discriminant analysis needs gcd(q, 6) = 1".into(),
        ));
    }
    Ok(())
}

/// The discriminant `-16(4A^3 + 27B^2)` with coefficients reduced
/// into `F_q`.
pub fn discriminant_poly(q: u64) -> Result<MPoly<FqtRing>> {
    check_char(q)?;
    let ring = FqtRing::new(Fq::from_order(q)?);
    parse("-16*(4*A^3 + 27*B^2)", &ring)
}

/// The density `(2N^2 - N)/N^4` of pairs whose discriminant has a
/// double zero at the given point.  For finite points of degree at
/// most 2 the formula is cross-checked against the Hensel local count.
pub fn local_double_zero_density(point: &P1Point) -> Result<BigRational> {
    let n = BigInt::from(point.norm());
    let count = BigInt::from(2) * &n * &n - &n;
    let density = BigRational::new(count.clone(), (&n).pow(4));
    if let P1Point::Finite(pi) = point {
        let q = pi.field().order();
        check_char(q)?;
        if pi.degree() <= 2 {
            let delta = discriminant_poly(q)?;
            let lc = count_zeros_hensel_a(&delta, pi, None)?;
            if BigInt::from(lc.count) != count {
                return Err(Error::Inconsistency(format!(
                    "local count {} at {} disagrees with the closed form {}",
                    lc.count,
                    pi.generator().render(),
                    count
                )));
            }
        }
    }
    Ok(density)
}

/// A prefactor times a truncated product over `P^1`, reported
/// separately so both pieces can be audited.
#[derive(Clone, Debug)]
pub struct LimitFormula {
    pub prefactor: BigRational,
    pub product: EulerProduct,
    pub value: f64,
}

fn p1_product(q: u64, degree_cutoff: u64) -> Result<EulerProduct> {
    let field = Fq::from_order(q)?;
    let mut entries: Vec<(String, LocalCount)> = Vec::new();
    let push = |entries: &mut Vec<(String, LocalCount)>, label: String, norm: u128| {
        entries.push((
            label,
            LocalCount {
                prime_norm: norm,
                count: 2 * norm * norm - norm,
                modulus_power: 2,
                arity: 2,
                method: Method::Hensel,
            },
        ));
    };
    if degree_cutoff >= 1 {
        push(&mut entries, "infinity".to_string(), q as u128);
    }
    for d in 1..=degree_cutoff {
        for pi in irreducibles_of_degree(&field, d as usize)? {
            push(&mut entries, pi.generator().render(), pi.norm());
        }
    }
    Ok(euler_product(&entries, 4, TailModel::FunctionField { q, cutoff: degree_cutoff }))
}

fn limit_formula(q: u64, degree_cutoff: u64, prefactor: BigRational) -> Result<LimitFormula> {
    check_char(q)?;
    let product = p1_product(q, degree_cutoff)?;
    let value = prefactor.to_f64().unwrap() * product.value_f64();
    Ok(LimitFormula { prefactor, product, value })
}

/// `gamma_q = q^3/((q-1)^2 (q+1)) * prod_{p in P^1} (1 - (2N^2-N)/N^4)`,
/// truncated at the degree cutoff (the infinity point has degree 1).
pub fn gamma_q(q: u64, degree_cutoff: u64) -> Result<LimitFormula> {
    let qb = BigInt::from(q);
    let denom = (&qb - BigInt::one()).pow(2) * (&qb + BigInt::one());
    limit_formula(q, degree_cutoff, BigRational::new((&qb).pow(3), denom))
}

/// `lim_d R_d / q^{10d+1} = (q/(q-1)) * prod_{p in P^1} (1 - (2N^2-N)/N^4)`.
pub fn rd_limit(q: u64, degree_cutoff: u64) -> Result<LimitFormula> {
    let qb = BigInt::from(q);
    let denom = &qb - BigInt::one();
    limit_formula(q, degree_cutoff, BigRational::new(qb.clone(), denom))
}

/// Fraction of pairs `(A, B)` of degree at most `degree_bound` whose
/// discriminant is squarefree in `F_q[t]` (affine points only; pairs
/// with vanishing discriminant count as non-squarefree).
pub fn empirical_disc_density(
    q: u64,
    degree_bound: u64,
    mode: Mode,
    budget: Option<u128>,
) -> Result<DensityEstimate> {
    check_char(q)?;
    let delta = discriminant_poly(q)?;
    let pred = PredicateA::Squarefree(delta);
    let spec = BoxSpec {
        dims: vec![degree_bound, degree_bound],
        regime: Regime::Unrestricted,
        mode,
        signed: false,
    };
    empirical_density_a(&pred, &spec, budget)
}
