use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mzi_core::estimation::{run_campaign_with, Trial};
use mzi_core::fisher::qfim_mixed_with;
use mzi_core::fock::squeezed_probe;
use mzi_core::gaussian::cfi_two_outcome;
use mzi_core::probe::{build_state, phase_average};
use mzi_core::{Execution, FockCutoff, Generator, ProbeSpec};

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn campaign(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign");
    let trial = Trial {
        m: 10_000,
        reps: 64,
        seed: 1,
        true_phi: 0.15,
        r: 1f64.asinh(),
        t: 0.5,
    };
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| run_campaign_with(black_box(&trial), exec).unwrap())
        });
    }
    group.finish();
}

fn cfi_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("cfi_grid");
    let points: Vec<(f64, f64, f64)> = [0.2, 0.5, 0.88]
        .iter()
        .flat_map(|&r| (1..20).map(move |k| (r, k as f64 * 0.05)))
        .flat_map(|(r, t)| [1e-4, 0.05, 0.2, 0.5].map(|phi| (r, t, phi)))
        .collect();
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new(name, points.len()), &points, |b, pts| {
            b.iter(|| {
                exec.map(pts, |&(r, t, phi)| {
                    cfi_two_outcome(r, t, phi).unwrap().value
                })
            })
        });
    }
    group.finish();
}

fn mixed_qfim(c: &mut Criterion) {
    let mut group = c.benchmark_group("qfim_mixed");
    group.sample_size(10);
    let avg = phase_average(&ProbeSpec::squeezed_with_nbar(1.0)).unwrap();
    let input = build_state(&avg, avg.auto_cutoff(1e-10).unwrap()).unwrap();
    let averaged = mzi_core::fock::apply_beam_splitter(&input, 0.5).unwrap();
    let squeezed_mix = squeezed_probe(0.5, 0.3, FockCutoff::with_n_max(40))
        .unwrap()
        .into_mixed();
    let gens = [Generator::Difference, Generator::Sum];
    for (label, state) in [("phase_averaged", &averaged), ("rank_one", &squeezed_mix)] {
        for (name, exec) in STRATEGIES {
            group.bench_function(BenchmarkId::new(name, label), |b| {
                b.iter(|| qfim_mixed_with(black_box(state), &gens, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, campaign, cfi_grid, mixed_qfim);
criterion_main!(benches);
