//! Verifier sweeps under both execution strategies. Run with
//! `cargo bench -p lwx2-core`; add `--no-default-features` to drop the
//! parallel arm.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lwx2_core::algebra::q_int;
use lwx2_core::brackets::{
    verify_linf, verify_lwx_point, GradedSpace, LInfStructure, MultiBracket, Symmetry,
};
use lwx2_core::constructions::{semidirect_double, skew_symmetrize};
use lwx2_core::exec::ExecMode;

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut m = vec![("sequential", ExecMode::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("parallel", ExecMode::Parallel));
    m
}

/// so(3) extended by a 3-dim abelian degree-(-1) module with the vector
/// action: a 6-dim 2-term fixture whose double is 12-dimensional.
fn so3_module() -> LInfStructure {
    let labels0: Vec<String> = (1..=3).map(|i| format!("e{i}")).collect();
    let labels1: Vec<String> = (1..=3).map(|i| format!("m{i}")).collect();
    let space = GradedSpace::new(vec![(0, labels0), (-1, labels1)]).unwrap();
    let mut l2 = MultiBracket::new(2, 0, Symmetry::GradedAntisymmetric);
    let eps = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
    for (i, j, k) in eps {
        l2.set(&space, &[i, j], &[(k, q_int(1))]).unwrap();
        // adjoint module action: e_i . m_j = eps_ijk m_k, both orientations
        l2.set(&space, &[i, j + 3], &[(k + 3, q_int(1))]).unwrap();
        l2.set(&space, &[j, i + 3], &[(k + 3, q_int(-1))]).unwrap();
    }
    let mut g = LInfStructure::new(space);
    g.set_bracket(2, l2).unwrap();
    g
}

fn bench_linf(c: &mut Criterion) {
    let g = so3_module();
    let mut group = c.benchmark_group("verify_linf_nmax4");
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let rep = verify_linf(&g, 4, mode);
                assert!(rep.passes());
            });
        });
    }
    group.finish();
}

fn bench_lwx_point(c: &mut Criterion) {
    let w = semidirect_double(&so3_module(), false).unwrap();
    let mut group = c.benchmark_group("verify_lwx_point_dim12");
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let rep = verify_lwx_point(&w, mode);
                assert!(rep.passes());
            });
        });
    }
    group.finish();
}

fn bench_skewed_lie3(c: &mut Criterion) {
    let lie3 = skew_symmetrize(&semidirect_double(&so3_module(), false).unwrap(), false).unwrap();
    let mut group = c.benchmark_group("verify_linf_lie3_nmax5");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let rep = verify_linf(&lie3, 5, mode);
                assert!(rep.passes());
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_linf, bench_lwx_point, bench_skewed_lie3);
criterion_main!(benches);
