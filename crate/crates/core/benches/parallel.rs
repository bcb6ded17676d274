use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use morse_core::geometry::CurvatureProfile;
use morse_core::indexform::{self, GalerkinBasis};
use morse_core::sampling::PlantedPath;
use morse_core::spectral::{self, CrossingParams};
use morse_core::suite::{self, SuiteParams};
use morse_core::Execution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn planted_paths(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let path = PlantedPath::random(24, &mut rng);
    let mut g = c.benchmark_group("planted_path");
    for (name, execution) in POLICIES {
        let params = CrossingParams {
            execution,
            ..CrossingParams::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| spectral::crossing_sum_identity(&path, &params).unwrap())
        });
    }
    g.finish();
}

fn galerkin_scan(c: &mut Criterion) {
    let profile = CurvatureProfile::scalar(2, (2.5 * PI).powi(2));
    let basis = GalerkinBasis::new(2, 24, 512).unwrap();
    let mut g = c.benchmark_group("galerkin_crossings");
    g.sample_size(10);
    for (name, execution) in POLICIES {
        let params = indexform::galerkin_crossing_params(execution);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| indexform::galerkin_crossings(&profile, &basis, &params).unwrap())
        });
    }
    g.finish();
}

fn random_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_suite");
    g.sample_size(10);
    for (name, execution) in POLICIES {
        let params = SuiteParams {
            trials: 6,
            modes: 32,
            quad_panels: 1024,
            execution,
            ..SuiteParams::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| suite::run_suite(&params).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, planted_paths, galerkin_scan, random_suite);
criterion_main!(benches);
