use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;

use thermo_lindblad::composite::{
    default_tau_grid, random_resonant_model, seeded_system_state, sigma_x_coupled_model, theorem1_sweep,
    tau_expansion, CompositeModel,
};
use thermo_lindblad::dynamics::propagate;
use thermo_lindblad::generator::{build_restricted_generator, RateFunction, ThermoSpec};
use thermo_lindblad::linalg::diag;
use thermo_lindblad::validator::{validate_generator, ValidationOptions};
use thermo_lindblad::Execution;

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn theorem1(c: &mut Criterion) {
    let models: Vec<CompositeModel> = (0..8).map(|s| random_resonant_model(4, 6, 1.0, 1.0, s).unwrap()).collect();
    let times = [0.1, 1.0, 10.0];
    let mut group = c.benchmark_group("theorem1_sweep");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| theorem1_sweep(&models, &times, exec).unwrap())
        });
    }
    group.finish();
}

fn tau_scan(c: &mut Criterion) {
    let model = sigma_x_coupled_model(1.0, 0.5, 1.0).unwrap();
    let rho = seeded_system_state(2, 7);
    let taus = default_tau_grid();
    let mut group = c.benchmark_group("tau_scan");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| tau_expansion(&model, &rho, &taus, exec).unwrap())
        });
    }
    group.finish();
}

fn qutrit_generator() -> thermo_lindblad::generator::GKLSGenerator {
    let spec = ThermoSpec::new(diag(&[0.0, 1.0, 3.0]), 1.0)
        .with_rate_function(&RateFunction::Ohmic { kappa: 0.5 })
        .unwrap()
        .with_alpha(DMatrix::identity(3, 3) * 0.2);
    build_restricted_generator(&spec).unwrap()
}

fn trajectory(c: &mut Criterion) {
    let gen = qutrit_generator();
    let rho0 = diag(&[0.0, 0.0, 1.0]);
    let times: Vec<f64> = (0..200).map(|k| 0.05 * k as f64).collect();
    let mut group = c.benchmark_group("trajectory_200");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| propagate(&gen.superoperator, &rho0, &times, exec).unwrap())
        });
    }
    group.finish();
}

fn validation(c: &mut Criterion) {
    let gen = qutrit_generator();
    let options = ValidationOptions::default();
    let mut group = c.benchmark_group("validate_generator");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| validate_generator("qutrit", &gen, 1.0, &options, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = theorem1, tau_scan, trajectory, validation
}
criterion_main!(benches);
