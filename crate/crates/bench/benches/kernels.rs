use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use sci_core::dynamics::{FiniteTree, Translation, TreeMap};
use sci_core::koopman::{assemble_section, LowerNormEvaluator, LowerNormMethod};
use sci_core::spectral_sets::{hausdorff_distance, hausdorff_distance_naive, SpectralSet};
use sci_core::tower::{residual_field_with, SpectralGrid};
use sci_core::xi::{run_xi_tower, threshold_random, TupleCodec, XiSchedule};
use sci_core::{Norm, SymbolicMap, TreeVersion};

fn section_assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("section_assembly");
    let tree = TreeMap::new(FiniteTree::full(5).unwrap(), TreeVersion::Dump).unwrap();
    for d in [6usize, 8, 10] {
        g.bench_with_input(BenchmarkId::new("dump_full5", d), &d, |b, &d| {
            b.iter(|| assemble_section(&tree, d, tree.info_depth(d)).unwrap())
        });
    }
    g.finish();
}

fn lower_norm(c: &mut Criterion) {
    let mut g = c.benchmark_group("lower_norm");
    let f = Translation { r: 1 };
    let z = Complex64::new(0.3, 0.8);
    for d in [3usize, 5, 7] {
        let sec = assemble_section(&f, d, d).unwrap();
        for method in [LowerNormMethod::Svd, LowerNormMethod::CycleExact] {
            let ev = LowerNormEvaluator::new(&sec, Norm::L2, method).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("{method:?}"), d), &ev, |b, ev| b.iter(|| ev.eval(black_box(z))));
        }
    }
    g.finish();
}

fn residual_field(c: &mut Criterion) {
    let mut g = c.benchmark_group("residual_field");
    g.sample_size(20);
    let f = Translation { r: 0 };
    let sec = assemble_section(&f, 4, 4).unwrap();
    let ev = LowerNormEvaluator::new(&sec, Norm::L2, LowerNormMethod::CycleExact).unwrap();
    for n2 in [16usize, 32, 64] {
        let grid = SpectralGrid::truncated(n2, Some(2.0)).unwrap();
        g.bench_with_input(BenchmarkId::new("tau0_d4", n2), &grid, |b, grid| {
            b.iter(|| residual_field_with(&sec, &ev, Norm::L2, grid))
        });
    }
    g.finish();
}

fn hausdorff(c: &mut Criterion) {
    let mut g = c.benchmark_group("hausdorff");
    let ring = |n: usize, r: f64| {
        let pts = (0..n).map(|k| Complex64::from_polar(r, k as f64 * 0.618_034 * std::f64::consts::TAU)).collect();
        SpectralSet::new(pts, 0.0).unwrap()
    };
    for n in [256usize, 2048] {
        let (a, b) = (ring(n, 1.0), ring(n, 1.05));
        g.bench_with_input(BenchmarkId::new("indexed", n), &(a.clone(), b.clone()), |bch, (a, b)| {
            bch.iter(|| hausdorff_distance(a, b))
        });
        g.bench_with_input(BenchmarkId::new("naive", n), &(a, b), |bch, (a, b)| {
            bch.iter(|| hausdorff_distance_naive(a, b))
        });
    }
    g.finish();
}

fn xi_tower(c: &mut Criterion) {
    let mut g = c.benchmark_group("xi_tower");
    for m in [2usize, 3] {
        let o = threshold_random(m, 6, 1, TupleCodec::default()).unwrap();
        let schedule = XiSchedule::uniform(m, 12, 3);
        g.bench_with_input(BenchmarkId::new("thresholded_T6", m), &m, |b, &m| {
            b.iter(|| run_xi_tower(&o, m, &schedule).unwrap())
        });
    }
    g.finish();
}

criterion_group!(kernels, section_assembly, lower_norm, residual_field, hausdorff, xi_tower);
criterion_main!(kernels);
