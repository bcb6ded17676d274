//! Randomized check of the index theorem over smooth profiles
//! `S(x) = Qᵀ diag(aᵢ + bᵢ sin(πx + φᵢ)) Q`.
//!
//! Trial `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, so
//! every trial is reproducible on its own and results do not depend on
//! scheduling. Profiles whose endpoint is conjugate at tolerance are drawn
//! again and counted.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::indexform::{self, GalerkinBasis, Identification, IndexFormError, IndexReport, VerifyParams};
use crate::jacobi;
use crate::sampling::SmoothProfileParams;

pub const PRNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub trials: usize,
    pub seed: u64,
    /// Fiber dimension of trial `k` is `fiber_dims[k % len]`.
    pub fiber_dims: Vec<usize>,
    pub modes: usize,
    pub quad_panels: usize,
    pub verify: VerifyParams,
    /// Also locate the crossings of the Galerkin path and pair them with
    /// the conjugate instants.
    pub identify: bool,
    pub max_redraws: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            trials: 50,
            seed: 7,
            fiber_dims: vec![1, 2, 3],
            modes: indexform::DEFAULT_MODES,
            quad_panels: indexform::DEFAULT_QUAD_PANELS,
            verify: VerifyParams::default(),
            identify: false,
            max_redraws: 100,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub fiber_dim: usize,
    pub redraws: usize,
    pub profile: SmoothProfileParams,
    pub report: IndexReport,
    pub identification: Option<Identification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub prng: String,
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub redraws: usize,
    /// Redraws over all draws.
    pub redraw_rate: f64,
    pub all_agree: bool,
    pub all_identified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("trial {trial}: {source}")]
pub struct SuiteError {
    pub trial: usize,
    #[source]
    pub source: IndexFormError,
}

/// Deterministic generator for trial `trial`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn run_trial(params: &SuiteParams, trial: usize) -> Result<TrialRecord, SuiteError> {
    let wrap = |source: IndexFormError| SuiteError { trial, source };
    if params.fiber_dims.is_empty() || params.fiber_dims.contains(&0) {
        return Err(wrap(IndexFormError::InvalidParameter(
            "fiber dimensions must be positive".into(),
        )));
    }
    let n = params.fiber_dims[trial % params.fiber_dims.len()];
    let basis = GalerkinBasis::new(n, params.modes, params.quad_panels).map_err(wrap)?;
    let mut rng = trial_rng(params.seed, trial);
    for redraws in 0..=params.max_redraws {
        let draw = SmoothProfileParams::random(n, &mut rng);
        let profile = draw.profile();
        let sol = jacobi::solve_jacobi(&profile, params.verify.steps).map_err(|e| wrap(e.into()))?;
        let conj = jacobi::conjugate_points(&sol, params.verify.kernel_tol).map_err(|e| wrap(e.into()))?;
        if !conj.nondegenerate {
            continue;
        }
        let report = indexform::verify_with_solution(&profile, &sol, &conj, &basis, &params.verify).map_err(wrap)?;
        let identification = if params.identify {
            let scan = indexform::galerkin_crossing_params(Execution::Sequential);
            let crossings = indexform::galerkin_crossings(&profile, &basis, &scan).map_err(wrap)?;
            Some(indexform::identify(&crossings, &conj, 1e-6))
        } else {
            None
        };
        return Ok(TrialRecord {
            trial,
            fiber_dim: n,
            redraws,
            profile: draw,
            report,
            identification,
        });
    }
    Err(wrap(IndexFormError::DegenerateGeodesic))
}

/// Run every trial, fanned out according to `params.execution`; records are
/// ordered by trial index and the first failing trial is reported.
pub fn run_suite(params: &SuiteParams) -> Result<SuiteReport, SuiteError> {
    let trials = params
        .execution
        .try_map_indexed(params.trials, |k| run_trial(params, k))?;
    let redraws: usize = trials.iter().map(|t| t.redraws).sum();
    let draws = trials.len() + redraws;
    Ok(SuiteReport {
        prng: PRNG_NAME.into(),
        seed: params.seed,
        redraws,
        redraw_rate: if draws == 0 { 0.0 } else { redraws as f64 / draws as f64 },
        all_agree: trials.iter().all(|t| t.report.agree),
        all_identified: params
            .identify
            .then(|| trials.iter().all(|t| t.identification.as_ref().is_some_and(|i| i.matches))),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(execution: Execution) -> SuiteParams {
        SuiteParams {
            trials: 4,
            seed: 3,
            modes: 48,
            quad_panels: 1024,
            execution,
            ..Default::default()
        }
    }

    #[test]
    fn small_suite_agrees() {
        let r = run_suite(&quick(Execution::Parallel)).unwrap();
        assert!(r.all_agree);
        assert_eq!(r.trials.len(), 4);
        assert_eq!(r.prng, PRNG_NAME);
        assert_eq!(r.trials.iter().map(|t| t.fiber_dim).collect::<Vec<_>>(), vec![1, 2, 3, 1]);
    }

    #[test]
    fn suite_is_deterministic_across_execution() {
        let a = run_suite(&quick(Execution::Sequential)).unwrap();
        let b = run_suite(&quick(Execution::Parallel)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn trials_are_independent_streams() {
        let p = quick(Execution::Sequential);
        let alone = run_trial(&p, 2).unwrap();
        let suite = run_suite(&p).unwrap();
        assert_eq!(suite.trials[2], alone);
    }
}
