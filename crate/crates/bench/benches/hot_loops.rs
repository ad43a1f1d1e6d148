use criterion::{black_box, criterion_group, criterion_main, Criterion};

use sqdense_core::arith::is_squarefree_u64;
use sqdense_core::density::squarefree_density_z;
use sqdense_core::finite::{parse_fqpoly, Fq, PrimeA};
use sqdense_core::localcount::{count_zeros_brute_z, count_zeros_hensel_a, count_zeros_hensel_z};
use sqdense_core::mpoly::{parse, FqtRing, IntRing};

fn bench_local_counts(c: &mut Criterion) {
    let f = parse("x^3 + y^3 - 7*z + 1", &IntRing).unwrap();
    c.bench_function("brute count mod 11^2, n = 3", |b| {
        b.iter(|| count_zeros_brute_z(black_box(&f), 11, 2, None).unwrap())
    });
    c.bench_function("hensel count mod 101^2, n = 3", |b| {
        b.iter(|| count_zeros_hensel_z(black_box(&f), 101, None).unwrap())
    });

    let ring = FqtRing::new(Fq::from_order(5).unwrap());
    let delta = parse("A^3 + 3*B^2", &ring).unwrap();
    let pi = PrimeA::new(parse_fqpoly(&ring.field, "t^2+2").unwrap()).unwrap();
    c.bench_function("hensel count at a degree-2 prime over F_5[t]", |b| {
        b.iter(|| count_zeros_hensel_a(black_box(&delta), &pi, None).unwrap())
    });
}

fn bench_products(c: &mut Criterion) {
    let f = parse("x^2+1", &IntRing).unwrap();
    c.bench_function("density product for x^2+1, cutoff 10^4", |b| {
        b.iter(|| squarefree_density_z(black_box(&f), 10_000, false, None).unwrap())
    });
}

fn bench_squarefree_sieve(c: &mut Criterion) {
    c.bench_function("squarefree test sweep, 10^4 values near 10^12", |b| {
        b.iter(|| {
            let mut hits = 0u64;
            for m in 0..10_000u64 {
                if is_squarefree_u64(black_box(1_000_000_000_000 + m)) {
                    hits += 1;
                }
            }
            hits
        })
    });
}

criterion_group!(benches, bench_local_counts, bench_products, bench_squarefree_sieve);
criterion_main!(benches);
