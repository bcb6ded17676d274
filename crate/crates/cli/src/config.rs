use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morse_core::geometry::expr::Expr;
use morse_core::geometry::spec_file::load_spec;
use morse_core::geometry::{builtin, builtin_catalog, CurvatureProfile, GeodesicRecord, ManifoldSpec, Scenario};
use morse_core::indexform::{self, GalerkinBasis, VerifyParams};
use morse_core::jacobi;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "morse", version, about = "Check the Morse index theorem along geodesics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conjugate instants of the geodesic and their multiplicities.
    Conjugate(RunArgs),
    /// Morse index of the index form on the Galerkin subspace.
    Index(RunArgs),
    /// Crossings of the index-form homotopy, paired with conjugate instants.
    Crossings(RunArgs),
    /// Compare Galerkin index, conjugate count and crossing signatures.
    Verify(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Conjugate(_) => "conjugate",
            Command::Index(_) => "index",
            Command::Crossings(_) => "crossings",
            Command::Verify(_) => "verify",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Conjugate(a) | Command::Index(a) | Command::Crossings(a) | Command::Verify(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in manifold: flat, sphere-constcurv, hyperbolic-constcurv,
    /// halfplane-metric2d or sphere-metric2d.
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,
    /// Manifold spec file (TOML, or JSON by extension).
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    /// Constant curvature profile S = VALUE·I, e.g. "(1.5pi)^2".
    #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
    pub constant: Option<String>,
    /// Random verification suite with this many trials (verify only).
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    /// Seed of the random suite.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Normal dimension for space forms and constant profiles; fixes the
    /// fiber dimension of random trials.
    #[arg(long, value_name = "N")]
    pub normal_dim: Option<usize>,
    /// Geodesic length, e.g. "2.5pi".
    #[arg(long, value_name = "L")]
    pub length: Option<String>,
    /// Integration steps on the unit interval [default: 2000, or the spec file's].
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sine modes per normal direction.
    #[arg(long, default_value_t = indexform::DEFAULT_MODES)]
    pub modes: usize,
    /// Simpson panels for the index-form integrals.
    #[arg(long, default_value_t = indexform::DEFAULT_QUAD_PANELS)]
    pub panels: usize,
    /// Relative tolerance for kernels of Jacobi fields.
    #[arg(long, default_value_t = jacobi::DEFAULT_KERNEL_TOL)]
    pub tol_kernel: f64,
    /// Eigenvalues of the Galerkin matrix below this count as zero.
    #[arg(long, default_value_t = indexform::DEFAULT_ZERO_TOL)]
    pub tol_zero: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// A resolved single-profile input.
pub struct Input {
    pub source: Value,
    pub steps: usize,
    pub profile: CurvatureProfile,
    pub geodesic: Option<GeodesicRecord>,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("--{name} must be positive, got {v}")))
    }
}

fn constant(name: &str, src: &str) -> Result<f64, CliError> {
    Expr::parse_constant(src).map_err(|e| CliError::config(format!("--{name}: {e}")))
}

impl RunArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        let sources = [self.builtin.is_some(), self.spec.is_some(), self.constant.is_some(), self.random.is_some()];
        match sources.iter().filter(|&&s| s).count() {
            0 => return Err(CliError::config("one of --builtin, --spec, --constant or --random is required")),
            1 => {}
            _ => return Err(CliError::config("--builtin, --spec, --constant and --random are mutually exclusive")),
        }
        if let Some(steps) = self.steps.filter(|&s| s < 100) {
            return Err(CliError::config(format!("--steps must be at least 100, got {steps}")));
        }
        if self.modes == 0 || self.panels == 0 {
            return Err(CliError::config("--modes and --panels must be positive"));
        }
        positive("tol-kernel", self.tol_kernel)?;
        positive("tol-zero", self.tol_zero)?;
        if self.normal_dim == Some(0) {
            return Err(CliError::config("--normal-dim must be positive"));
        }
        if self.random == Some(0) {
            return Err(CliError::config("--random needs at least one trial"));
        }
        if self.random.is_some() && (self.length.is_some()) {
            return Err(CliError::config("--length does not apply to --random"));
        }
        Ok(())
    }

    pub fn basis(&self, n: usize) -> GalerkinBasis {
        GalerkinBasis {
            n,
            modes: self.modes,
            quad_panels: self.panels,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or(jacobi::DEFAULT_STEPS)
    }

    pub fn verify_params(&self, steps: usize) -> VerifyParams {
        VerifyParams {
            steps,
            kernel_tol: self.tol_kernel,
            zero_tol: self.tol_zero,
            ..VerifyParams::default()
        }
    }

    fn length(&self) -> Result<Option<f64>, CliError> {
        let length = self.length.as_deref().map(|s| constant("length", s)).transpose()?;
        if let Some(l) = length {
            positive("length", l)?;
        }
        Ok(length)
    }

    fn scenario(&self) -> Result<(Scenario, Value), CliError> {
        let length = self.length()?;
        if let Some(name) = &self.builtin {
            let entry = builtin(name).ok_or_else(|| {
                let names: Vec<&str> = builtin_catalog().iter().map(|e| e.name).collect();
                CliError::config(format!("unknown built-in `{name}`; available: {}", names.join(", ")))
            })?;
            let entry = match self.normal_dim {
                Some(n) => entry
                    .with_dim(n + 1)
                    .ok_or_else(|| CliError::config(format!("`{name}` is two-dimensional; --normal-dim must be 1")))?,
                None => entry,
            };
            let scenario = entry.scenario(length, self.steps());
            let source = json!({ "builtin": name, "length": scenario.length });
            return Ok((scenario, source));
        }
        if let Some(path) = &self.spec {
            if self.normal_dim.is_some() {
                return Err(CliError::config("--normal-dim does not apply to spec files"));
            }
            let mut scenario = load_spec(path)?;
            if length.is_some() {
                if matches!(scenario.spec, ManifoldSpec::DirectProfile(_)) {
                    return Err(CliError::config("--length does not apply to direct profiles"));
                }
                scenario.length = length;
            }
            if let Some(steps) = self.steps {
                scenario.steps = steps;
            }
            if scenario.steps < 100 {
                return Err(CliError::config(format!("steps must be at least 100, got {}", scenario.steps)));
            }
            let source = json!({ "spec": path.display().to_string(), "length": scenario.length });
            return Ok((scenario, source));
        }
        let src = self.constant.as_deref().expect("validated input source");
        if length.is_some() {
            return Err(CliError::config("--length does not apply to --constant"));
        }
        let value = constant("constant", src)?;
        let n = self.normal_dim.unwrap_or(1);
        let scenario = Scenario {
            spec: ManifoldSpec::DirectProfile(CurvatureProfile::scalar(n, value)),
            start: [0.0, 0.0],
            direction: [1.0, 0.0],
            length: None,
            steps: self.steps(),
        };
        Ok((scenario, json!({ "constant": value, "normal_dim": n })))
    }

    pub fn input(&self) -> Result<Input, CliError> {
        let (scenario, source) = self.scenario()?;
        let out = scenario.build()?;
        Ok(Input {
            source,
            steps: scenario.steps,
            profile: out.profile,
            geodesic: out.geodesic,
        })
    }

    /// Numeric settings echoed into every report.
    pub fn settings(&self, steps: usize) -> Value {
        json!({
            "steps": steps,
            "modes": self.modes,
            "panels": self.panels,
            "tol_kernel": self.tol_kernel,
            "tol_zero": self.tol_zero,
        })
    }
}
