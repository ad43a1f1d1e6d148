//! Acceptance gate: one test per criterion, each printing a single
//! pass line (run with `--nocapture` to see them; a failed assertion
//! fails the corresponding criterion).

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use sqdense_core::density::{
    coprime_density_z, empirical_density_a, empirical_density_z, squarefree_density_a,
    squarefree_density_z, BoxSpec, Mode, PredicateA, PredicateZ,
};
use sqdense_core::ecdisc::{discriminant_poly, empirical_disc_density};
use sqdense_core::finite::{irreducibles_of_degree, parse_fqpoly, polys_up_to_degree, Fq, FqPoly};
use sqdense_core::localcount::{
    count_zeros_brute_a, count_zeros_brute_z, count_zeros_hensel_a, count_zeros_hensel_z,
    derivative_criterion, pth_power_decomposition, restrict_scalars,
};
use sqdense_core::mpoly::{parse, FqtRing, IntRing, MPoly};
use sqdense_core::qclasses::{collision_count, image_count};
use sqdense_core::unipoly::ZPoly;

const INV_ZETA2: f64 = 0.6079271018540267; // 6/pi^2

fn pass(n: u32, what: &str) {
    println!("[PASS] criterion {n}: {what}");
}

fn zp(s: &str) -> MPoly<IntRing> {
    parse(s, &IntRing).unwrap()
}

fn random_z_poly(rng: &mut Xoshiro256PlusPlus) -> MPoly<IntRing> {
    let names: [&str; 3] = ["x", "y", "z"];
    let n = rng.gen_range(1..=3usize);
    let vars: Vec<String> = names[..n].iter().map(|s| s.to_string()).collect();
    let nterms = rng.gen_range(1..=5);
    let terms = (0..nterms)
        .map(|_| {
            let mut exps = vec![0u32; n];
            for _ in 0..rng.gen_range(0..=4u32) {
                exps[rng.gen_range(0..n)] += 1;
            }
            (exps, BigInt::from(rng.gen_range(-30i64..=30)))
        })
        .collect();
    MPoly::from_terms(&IntRing, &vars, terms)
}

fn random_a_poly(ring: &FqtRing, n: usize, rng: &mut Xoshiro256PlusPlus) -> MPoly<FqtRing> {
    let q = ring.field.order();
    let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let nterms = rng.gen_range(1..=4);
    let terms = (0..nterms)
        .map(|_| {
            let mut exps = vec![0u32; n];
            for _ in 0..rng.gen_range(0..=3u32) {
                exps[rng.gen_range(0..n)] += 1;
            }
            let coeffs: Vec<u8> = (0..3).map(|_| rng.gen_range(0..q) as u8).collect();
            (exps, FqPoly::from_coeffs(&ring.field, coeffs))
        })
        .collect();
    MPoly::from_terms(ring, &vars, terms)
}

#[test]
fn criterion_01_hensel_brute_equivalence() {
    let primes: Vec<u64> = vec![2, 3, 5, 7, 11, 13, 17, 19, 23];
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1001);
    for trial in 0..50 {
        let f = random_z_poly(&mut rng);
        for &p in &primes {
            let h = count_zeros_hensel_z(&f, p, Some(200_000_000)).unwrap();
            let b = count_zeros_brute_z(&f, p, 2, Some(200_000_000)).unwrap();
            assert_eq!(h.count, b.count, "trial {trial}, p={p}, f={f:?}");
        }
    }
    for q in [2u64, 3] {
        let field = Fq::from_order(q).unwrap();
        let ring = FqtRing::new(field.clone());
        let mut primes = irreducibles_of_degree(&field, 1).unwrap();
        primes.extend(irreducibles_of_degree(&field, 2).unwrap());
        for trial in 0..10 {
            let f = random_a_poly(&ring, rng.gen_range(1..=2), &mut rng);
            for pi in &primes {
                let h = count_zeros_hensel_a(&f, pi, None).unwrap();
                let b = count_zeros_brute_a(&f, pi, 2, None).unwrap();
                assert_eq!(
                    h.count,
                    b.count,
                    "q={q}, trial {trial}, pi={}, f={f:?}",
                    pi.generator().render()
                );
            }
        }
    }
    pass(1, "hensel = brute for p <= 23 (50 integer polys) and deg <= 2 primes over F2/F3 (20 A-polys)");
}

#[test]
fn criterion_02_euler_product_baseline() {
    let ep = squarefree_density_z(&zp("x"), 1_000_000, false, None).unwrap();
    let err = (ep.value_f64() - INV_ZETA2).abs();
    assert!(err < 1e-6, "|{} - 6/pi^2| = {err}", ep.value_f64());
    pass(2, "product for f = x at cutoff 10^6 equals 6/pi^2 within 1e-6");
}

#[test]
fn criterion_03_empirical_vs_product() {
    let est = empirical_density_z(
        &PredicateZ::Squarefree(zp("x")),
        &BoxSpec::exhaustive(vec![1_000_000]),
        None,
    )
    .unwrap();
    assert_eq!(est.hits, 607_926);
    assert!((est.ratio - INV_ZETA2).abs() <= 1e-3);

    let est = empirical_density_z(
        &PredicateZ::Squarefree(zp("x^2+1")),
        &BoxSpec::exhaustive(vec![1_000_000]),
        None,
    )
    .unwrap();
    let product = squarefree_density_z(&zp("x^2+1"), 10_000, false, None).unwrap();
    let err = (est.ratio - product.value_f64()).abs();
    assert!(err <= 3e-3, "|{} - {}| = {err}", est.ratio, product.value_f64());
    pass(3, "empirical squarefree densities track the products (f = x and f = x^2+1 at B = 10^6)");
}

#[test]
fn criterion_04_coprime_pairs() {
    let pred = PredicateZ::Coprime(zp("x"), zp("y")).normalized();
    let est = empirical_density_z(&pred, &BoxSpec::exhaustive(vec![1000, 1000]), None).unwrap();
    assert_eq!(est.hits, 608_383);

    let product = coprime_density_z(&zp("x+y"), &zp("x-y"), 10_000, None).unwrap();
    let pred = PredicateZ::Coprime(zp("x+y"), zp("x-y")).normalized();
    let est = empirical_density_z(&pred, &BoxSpec::exhaustive(vec![2000, 2000]), None).unwrap();
    let err = (product.value_f64() - est.ratio).abs();
    assert!(err <= 5e-3, "|{} - {}| = {err}", product.value_f64(), est.ratio);
    let four_over_pi2 = 2.0 * INV_ZETA2 / 3.0;
    assert!((product.value_f64() - four_over_pi2).abs() <= 1e-3);
    pass(4, "coprime pair counts and the 4/pi^2 product agree at the stated tolerances");
}

#[test]
fn criterion_05_function_field_small_case() {
    let ring = FqtRing::new(Fq::from_order(2).unwrap());
    let f = parse("x", &ring).unwrap();
    let est =
        empirical_density_a(&PredicateA::Squarefree(f.clone()), &BoxSpec::exhaustive(vec![12]), None)
            .unwrap();
    assert_eq!((est.hits, est.total), (4097, 8192));
    let product = squarefree_density_a(&f, 10, false, None).unwrap();
    assert!((product.value_f64() - 0.5).abs() <= 1e-3, "{}", product.value_f64());
    pass(5, "squarefree count over F2[t] (deg <= 12) is exactly 4097/8192; product at cutoff 10 is 0.5 within 1e-3");
}

#[test]
fn criterion_06_derivative_criterion_boxes() {
    for q in [2u64, 3] {
        let field = Fq::from_order(q).unwrap();
        let ring = FqtRing::new(field.clone());
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(600 + q);
        let mut primes = irreducibles_of_degree(&field, 1).unwrap();
        primes.extend(irreducibles_of_degree(&field, 2).unwrap());
        for trial in 0..5 {
            let f = random_a_poly(&ring, 1, &mut rng);
            let big = restrict_scalars(&f, &[0]).unwrap();
            for pi in &primes {
                let d = field.characteristic() as usize * pi.degree();
                for a in polys_up_to_degree(&field, d - 1).unwrap() {
                    let pt = pth_power_decomposition(&a);
                    let (square, pair) = derivative_criterion(&big, pi, &pt).unwrap();
                    assert_eq!(
                        square,
                        pair,
                        "q={q}, trial {trial}, pi={}, a={}",
                        pi.generator().render(),
                        a.render()
                    );
                }
            }
        }
    }
    pass(6, "pi^2 | F(a) matches the (F, dF/dt) divisibility pair on exhaustive lift boxes");
}

#[test]
fn criterion_07_image_ratio_linear() {
    let f = ZPoly::from_i64(&[1, 4]);
    let ic = image_count(&f, 200_000, None).unwrap();
    let target = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let err = (ic.ratio - target).abs();
    assert!(err <= 0.01, "|{} - {target}| = {err}", ic.ratio);
    pass(7, "image ratio of 4x+1 at B = 2*10^5 is within 0.01 of 8/pi^2");
}

#[test]
fn criterion_08_image_and_collisions_quadratic() {
    let f = ZPoly::from_i64(&[1, 0, 1]);
    let ic = image_count(&f, 100_000, None).unwrap();
    assert!(
        (0.95..=1.0).contains(&ic.ratio),
        "image ratio {} out of [0.95, 1]",
        ic.ratio
    );
    let two = BigRational::from(BigInt::from(2));
    assert_eq!(collision_count(&f, &two, 100).unwrap(), 3);
    let mut prev = f64::INFINITY;
    for b in [100u64, 1000, 10_000] {
        let ratio = collision_count(&f, &two, b).unwrap() as f64 / b as f64;
        assert!(ratio < prev, "collision ratio not decreasing at B = {b}");
        prev = ratio;
    }
    pass(8, "x^2+1 image ratio in [0.95, 1]; Pell collisions = 3 at B = 100 with decreasing ratio");
}

#[test]
fn criterion_09_ec_discriminant() {
    let delta5 = discriminant_poly(5).unwrap();
    let field5 = Fq::from_order(5).unwrap();
    let pi_t = sqdense_core::finite::PrimeA::new(parse_fqpoly(&field5, "t").unwrap()).unwrap();
    let h = count_zeros_hensel_a(&delta5, &pi_t, None).unwrap();
    let b = count_zeros_brute_a(&delta5, &pi_t, 2, None).unwrap();
    assert_eq!((h.count, b.count), (45, 45));

    for q in [5u64, 7] {
        let field = Fq::from_order(q).unwrap();
        let delta = discriminant_poly(q).unwrap();
        for d in 1..=2usize {
            for pi in irreducibles_of_degree(&field, d).unwrap() {
                let n = pi.norm();
                let c = count_zeros_hensel_a(&delta, &pi, None).unwrap().count;
                assert_eq!(c, 2 * n * n - n, "q={q}, pi={}", pi.generator().render());
            }
        }
    }

    let est = empirical_disc_density(5, 4, Mode::Exhaustive, None).unwrap();
    let product = squarefree_density_a(&delta5, 4, false, None).unwrap();
    let err = (est.ratio - product.value_f64()).abs();
    assert!(err <= 0.02, "|{} - {}| = {err}", est.ratio, product.value_f64());
    pass(9, "c(Delta) = 2N^2 - N at all small points over q in {5,7}; empirical pair density matches the product within 0.02");
}

#[test]
fn criterion_10_zero_set_density() {
    let est = empirical_density_z(
        &PredicateZ::Zero(zp("x1-x2")),
        &BoxSpec::exhaustive(vec![1000, 1000]),
        None,
    )
    .unwrap();
    assert_eq!(est.ratio, 0.001);

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1010);
    let vars: Vec<String> = vec!["x".into(), "y".into()];
    let mut done = 0;
    while done < 10 {
        let nterms = rng.gen_range(1..=4);
        let terms = (0..nterms)
            .map(|_| {
                let mut exps = vec![0u32; 2];
                for _ in 0..rng.gen_range(0..=3u32) {
                    exps[rng.gen_range(0..2)] += 1;
                }
                (exps, BigInt::from(rng.gen_range(-9i64..=9)))
            })
            .collect();
        let f = MPoly::from_terms(&IntRing, &vars, terms);
        if f.is_zero() {
            continue;
        }
        let deg = f.total_degree().unwrap() as f64;
        let est = empirical_density_z(
            &PredicateZ::Zero(f.clone()),
            &BoxSpec::exhaustive(vec![1000, 1000]),
            None,
        )
        .unwrap();
        assert!(est.ratio <= (deg + 1.0) / 1000.0, "f={f:?}: {}", est.ratio);
        done += 1;
    }
    pass(10, "zero-set density of x1-x2 is exactly 0.001; random nonzero f stay below (deg+1)/1000");
}
