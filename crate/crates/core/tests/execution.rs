use morse_core::sampling::PlantedPath;
use morse_core::spectral::{self, CrossingParams};
use morse_core::suite::{self, SuiteParams};
use morse_core::Execution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn policies_give_identical_crossings() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let path = PlantedPath::random(12, &mut rng);
    let run = |execution| {
        let params = CrossingParams {
            execution,
            ..CrossingParams::default()
        };
        spectral::crossing_sum_identity(&path, &params).unwrap()
    };
    let seq = run(Execution::Sequential);
    assert!(seq.holds);
    assert_eq!(seq, run(Execution::Parallel));
}

#[test]
fn policies_give_identical_suites() {
    let run = |execution| {
        let params = SuiteParams {
            trials: 4,
            seed: 99,
            modes: 32,
            quad_panels: 1024,
            execution,
            ..SuiteParams::default()
        };
        suite::run_suite(&params).unwrap()
    };
    let seq = run(Execution::Sequential);
    assert!(seq.all_agree);
    assert_eq!(seq, run(Execution::Parallel));
}
