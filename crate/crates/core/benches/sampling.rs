use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use forest_spectra::estimator::{estimate_moments, QGrid};
use forest_spectra::generate::erdos_renyi;
use forest_spectra::pipeline::bench_costs;
use forest_spectra::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_moments");
    group.sample_size(10);
    for n in [500usize, 2000] {
        let g = erdos_renyi(n, 3.0 * (n as f64).ln() / n as f64, 1).unwrap();
        let s = g.scalars();
        let grid = QGrid::geometric(0.01 * s.lambda_bar, s.spectral_upper, 0.1).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| estimate_moments(&g, &grid.values, 4, 32, 3, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let mut group = c.benchmark_group("trajectories");
    group.sample_size(10);
    // Above the dense cap, so only sampling is timed.
    let g = erdos_renyi(4000, 3.0 * 4000f64.ln() / 4000.0, 1).unwrap();
    let q0 = 0.01 * g.scalars().lambda_bar;
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| bench_costs(&g, q0, 64, 5, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, moments, trajectories);
criterion_main!(benches);
