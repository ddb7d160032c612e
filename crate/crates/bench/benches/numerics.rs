use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hyperpoincare::constants::{brute_force_cnp, c_np};
use hyperpoincare::hyp::{weight_w, GreenTable};
use hyperpoincare::quadrature::radial_energy;
use hyperpoincare::rp::solve_rp;
use hyperpoincare::testfun::{make_bump, random_separable, trial_rng, BumpShape};
use hyperpoincare::verify::{verify, TestInput};
use hyperpoincare::{InequalityKind, Params, Tolerance};

fn weights(c: &mut Criterion) {
    let params = Params::new(5, 3.0).unwrap();
    c.bench_function("weight_w direct r=1.5", |b| {
        b.iter(|| weight_w(&params, black_box(1.5), 1e-10).unwrap())
    });
    let mut g = c.benchmark_group("green_table");
    g.sample_size(10);
    g.bench_function("build N=5 p=3", |b| {
        b.iter(|| GreenTable::build(black_box(&params), 1e-10).unwrap())
    });
    g.finish();
    let table = GreenTable::build(&params, 1e-10).unwrap();
    c.bench_function("green_table lookup r=1.5", |b| {
        b.iter(|| table.weight(black_box(1.5)).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let params = Params::new(7, 3.0).unwrap();
    let u = make_bump(0.3, 6.0, BumpShape::Mollifier).unwrap();
    c.bench_function("radial_energy mollifier N=7 p=3", |b| {
        b.iter(|| radial_energy(&params, black_box(&u), Tolerance::relative(1e-10)).unwrap())
    });
    let f = random_separable(&mut trial_rng(1, 0), 3).unwrap();
    let hp = Params::new(3, 3.0).unwrap();
    let mut g = c.benchmark_group("halfspace");
    g.sample_size(10);
    g.bench_function("verify THM32 N=3 p=3", |b| {
        b.iter(|| {
            verify(
                InequalityKind::Thm32,
                &hp,
                TestInput::HalfSpace(black_box(&f)),
                1e-8,
            )
            .unwrap()
        })
    });
    g.finish();
}

fn roots_and_constants(c: &mut Criterion) {
    let params = Params::new(13, 4.0).unwrap();
    c.bench_function("solve_rp N=13 p=4", |b| {
        b.iter(|| solve_rp(black_box(&params)).unwrap())
    });
    c.bench_function("c_np N=13 p=4", |b| b.iter(|| c_np(black_box(&params))));
    let low = Params::new(4, 1.5).unwrap();
    c.bench_function("brute_force_cnp N=4 p=1.5 grid 20000", |b| {
        b.iter(|| brute_force_cnp(black_box(&low), 20_000).unwrap())
    });
}

criterion_group!(benches, weights, quadrature, roots_and_constants);
criterion_main!(benches);
