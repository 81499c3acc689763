use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stehbein::connection::{curvature, dn};
use stehbein::fixtures::{random_phase_twist, su2_torsionfree_connection};
use stehbein::involution::{build_jn, check_jn_involutive};
use stehbein::verify::run_verify;
use stehbein::{Input, VerifyOptions};

fn jn(c: &mut Criterion) {
    let b = random_phase_twist(3, 1).0;
    let mut group = c.benchmark_group("jn");
    for order in 3..=5 {
        group.bench_with_input(BenchmarkId::new("build", order), &order, |bch, &o| {
            bch.iter(|| build_jn(black_box(&b), o).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("involutive", order), &order, |bch, &o| {
            bch.iter(|| check_jn_involutive(black_box(&b), o).unwrap())
        });
    }
    group.finish();
}

fn dn_and_curvature(c: &mut Criterion) {
    let (g, conn) = su2_torsionfree_connection();
    let mut group = c.benchmark_group("connection");
    for degree in 1..=3 {
        let basis = g.frame_basis(&vec![0; degree]);
        group.bench_with_input(BenchmarkId::new("dn", degree), &basis, |bch, t| {
            bch.iter(|| dn(&conn, &g, &g.s, black_box(t)).unwrap())
        });
    }
    group.bench_function("curvature", |bch| bch.iter(|| curvature(black_box(&conn), &g, &g.s).unwrap()));
    group.finish();
}

fn verify(c: &mut Criterion) {
    let input = Input::Geometry(Box::new(su2_torsionfree_connection().0));
    let opts = VerifyOptions::default();
    c.bench_function("verify/su2-torsion-free", |bch| {
        bch.iter(|| run_verify(black_box(&input), &opts).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = jn, dn_and_curvature, verify
}
criterion_main!(benches);
