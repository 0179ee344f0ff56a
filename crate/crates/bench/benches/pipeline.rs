use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pptcanon::rng::PortableRng;
use pptcanon::{
    canonicalize, decompose, gen_state, hermitian_eig, ppt_report, FamilyMode, GenSpec, Scramble, ToleranceConfig,
    DEFAULT_TRIALS,
};

fn eig(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let mut group = c.benchmark_group("hermitian_eig");
    for n in [8, 24, 48] {
        let h = PortableRng::new(1, 0).gaussian_matrix(n, n).hermitian_part();
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| hermitian_eig(h, &tol).unwrap()));
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    for (m, n) in [(2, 2), (3, 4), (4, 6)] {
        let spec = GenSpec::new(m, n, 0).mode(FamilyMode::Conjugated).scramble(Scramble::Invertible);
        let rho = gen_state(&spec).unwrap();
        let id = format!("{m}x{n}");
        c.bench_with_input(BenchmarkId::new("ppt_report", &id), &rho, |b, r| b.iter(|| ppt_report(r, &tol).unwrap()));
        c.bench_with_input(BenchmarkId::new("canonicalize", &id), &rho, |b, r| {
            b.iter(|| canonicalize(r, &tol).unwrap())
        });
        c.bench_with_input(BenchmarkId::new("decompose", &id), &rho, |b, r| {
            b.iter(|| decompose(r, &tol, DEFAULT_TRIALS, 0).unwrap())
        });
    }
}

criterion_group!(benches, eig, pipeline);
criterion_main!(benches);
