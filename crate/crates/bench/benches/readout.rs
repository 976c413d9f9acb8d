use criterion::{black_box, criterion_group, criterion_main, Criterion};
use omit_core::numerics::log_space;
use omit_core::readout::{sweep_chi, ChiSweepSetup, DEFAULT_REL_TOL};
use omit_core::{measurement_time, optimize_cooperativity, snr_squared};

fn closed_forms(c: &mut Criterion) {
    c.bench_function("snr_squared", |b| {
        b.iter(|| snr_squared(black_box(0.66), black_box(0.133), black_box(8.6), black_box(20.0), black_box(1.0)))
    });
    c.bench_function("measurement_time", |b| {
        b.iter(|| measurement_time(black_box(0.133), 20.0, 0.0, black_box(8.6), DEFAULT_REL_TOL))
    });
    c.bench_function("optimize_cooperativity", |b| {
        b.iter(|| optimize_cooperativity(black_box(0.133), 20.0, 0.0, 1e6, DEFAULT_REL_TOL))
    });
}

fn chi_sweep(c: &mut Criterion) {
    let setup = ChiSweepSetup {
        a_pr_norm: 20.0,
        n_th: 0.0,
        c_max: 1e6,
        kappa_over_gamma: 1e4,
        delta_sm_over_gamma: 750.0,
        n_spins: 1,
        gamma_mech: 2.0 * std::f64::consts::PI * 2e5,
        rel_tol: DEFAULT_REL_TOL,
    };
    let grid = log_space(1e-3, 1e3, 60);
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("fig2_grid_60", |b| b.iter(|| sweep_chi(black_box(&grid), &setup)));
    group.finish();
}

criterion_group!(benches, closed_forms, chi_sweep);
criterion_main!(benches);
