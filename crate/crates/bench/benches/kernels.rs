use criterion::{black_box, criterion_group, criterion_main, Criterion};
use parametrix_bench::{bump, lipschitz_laplacian};
use parametrix_core::kernels::lattice::weak_kernel_grid;
use parametrix_core::kernels::{fundamental_solution, named_operator};
use parametrix_core::operator::MultiIndex;
use parametrix_core::orlicz::{convolve_kernel, luxemburg_norm};
use parametrix_core::parametrix::ParametrixOperator;
use parametrix_core::young::{complementary, default_conjugate_grid};
use parametrix_core::YoungFunction;

fn convolution(c: &mut Criterion) {
    let j = fundamental_solution(&named_operator("laplace2d").unwrap()).unwrap();
    for npts in [32, 64] {
        let f = bump(2, npts);
        let k = weak_kernel_grid(&j, &MultiIndex::new(&[0, 0]), &f.domain).unwrap();
        c.bench_function(&format!("convolve_kernel 2D N={npts}"), |b| b.iter(|| convolve_kernel(black_box(&k), black_box(&f)).unwrap()));
    }
}

fn norms(c: &mut Criterion) {
    let f = bump(2, 64);
    let m = YoungFunction::power_log(2.0, 1.0).unwrap();
    c.bench_function("luxemburg_norm power-log 2D N=64", |b| b.iter(|| luxemburg_norm(black_box(&f), &m).unwrap()));
}

fn conjugate(c: &mut Criterion) {
    let m = YoungFunction::power_log(2.0, 1.0).unwrap();
    let grid = default_conjugate_grid(&m);
    c.bench_function("complementary power-log default grid", |b| b.iter(|| complementary(black_box(&m), &grid).unwrap()));
}

fn parametrix(c: &mut Criterion) {
    let young = YoungFunction::power(2.0, 1.0).unwrap();
    let p = ParametrixOperator::new(&lipschitz_laplacian(), &[0.0, 0.0], 0.2, 64, &young, None).unwrap();
    let phi = parametrix_core::probes::mollifier_bump(p.domain(), &[0.0, 0.0], 0.15);
    c.bench_function("t_apply 2D N=64", |b| b.iter(|| p.t_apply(black_box(&phi)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = convolution, norms, conjugate, parametrix
}
criterion_main!(benches);
