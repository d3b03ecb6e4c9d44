use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlwave_core::characteristics::default_blowup_grid;
use qlwave_core::experiment::{Experiment, ExperimentConfig, Scenario};
use qlwave_core::norms::{kernel_form, GridFunction};
use qlwave_core::profiles::build_chi;
use qlwave_core::transport::{IntegrationSettings, SourceSpec, TransportProblem};
use qlwave_core::{Execution, Grid1D, ModelParams};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn transport(c: &mut Criterion) {
    let chi = build_chi(&ModelParams::default()).unwrap();
    let x1 = default_blowup_grid(0.01, 100).unwrap();
    let x2 = Grid1D::uniform(-0.04, 0.04, 8).unwrap();
    let settings = IntegrationSettings::new(0.1, 1e-4);
    let mut group = c.benchmark_group("transport_integrate");
    group.sample_size(10);
    for (name, exec) in MODES {
        let p = TransportProblem::new(chi.clone(), SourceSpec::default()).with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| p.integrate(&x1, &x2, &settings).unwrap()));
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let g = GridFunction::sample_1d(-1.0, 1e-3, 2001, |x| (1.0 - 50.0 * x * x) * (-25.0 * x * x).exp()).unwrap();
    let mut group = c.benchmark_group("kernel_form");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| kernel_form(&g, &g, 0.05, exec).unwrap()));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("windowed_series");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut cfg = ExperimentConfig::for_scenario(Scenario::Model);
        cfg.execution = exec;
        let e = Experiment::new(cfg).unwrap();
        let report = e.detect().unwrap().report;
        let times: Vec<f64> = e.rate_times(&report).into_iter().map(|p| p.1).collect();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| e.windowed_series(&report, &times).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transport, kernel, sweep);
criterion_main!(benches);
