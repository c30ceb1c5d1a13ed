//! Parallel-vs-sequential comparison of the two data-parallel hot paths:
//! sweep execution and per-target concentrability induction.
//!
//! `jobs = 1` takes the strictly sequential code path; higher values build a
//! rayon pool of that size. Compiling with `--no-default-features` removes
//! rayon entirely, in which case every jobs setting measures the sequential
//! loop.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use apilab::concentrability::c_coefficients;
use apilab::garnet::{generate_garnet, GarnetParams};
use apilab::mdp::Distribution;
use apilab::sweep::{AlgorithmSpec, GreedySpec, SweepSpec};
use apilab::greedy::{BasisKind, NoiseMode};

fn bench_sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        n_states: vec![50],
        n_actions: vec![2],
        branching: vec![2],
        n_features: vec![5],
        n_mdps: 6,
        n_runs: 6,
        gamma: 0.95,
        r_max: 1.0,
        iterations: 15,
        base_seed: 7,
        greedy: GreedySpec {
            basis: BasisKind::Fourier,
            n_coeffs: None,
            noise: 0.05,
            noise_mode: NoiseMode::Relative,
        },
        algorithms: vec![
            AlgorithmSpec::Dpi,
            AlgorithmSpec::Nsdpi,
            AlgorithmSpec::CpiAlpha { alpha: 0.1 },
        ],
        plot_y_max: None,
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (label, jobs) in [("sequential", 1usize), ("parallel", 0)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &jobs, |b, &jobs| {
            b.iter(|| apilab::sweep::run_sweep(black_box(&spec), jobs).unwrap());
        });
    }
    group.finish();
}

fn bench_concentrability(c: &mut Criterion) {
    let params = GarnetParams::new(100, 3, 2, 10, 11).unwrap();
    let (mdp, _) = generate_garnet(&params, 0.95, 1.0).unwrap();
    let mu = Distribution::uniform(100);
    let nu = Distribution::uniform(100);
    let mut group = c.benchmark_group("c_coefficients");
    group.sample_size(10);
    for (label, jobs) in [("sequential", 1usize), ("parallel", 0)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &jobs, |b, &jobs| {
            b.iter(|| c_coefficients(black_box(&mdp), &mu, &nu, 500, jobs));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_concentrability);
criterion_main!(benches);
