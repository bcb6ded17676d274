//! Declarative manifold specification files (TOML, or JSON by extension).
//!
//! ```toml
//! kind = "metric2d"            # "constant-curvature" | "metric2d" | "direct-profile"
//! length = "2.5pi"             # optional; number or constant expression
//! steps = 2000                 # optional
//! start = ["pi/2", 0]          # metric2d only
//! direction = [0, 1]           # metric2d only
//!
//! [metric]                     # metric2d only; expressions in x, y
//! g11 = "1"
//! g12 = "0"                    # optional, defaults to "0"
//! g22 = "sin(x)^2"
//! derivatives = "symbolic"     # or "central"
//! fd_step = 1e-4               # central only
//! ```
//!
//! Space forms use `dim` (default 2) and `kappa`; direct profiles give a
//! square `profile` matrix of expressions in `x`. Unknown keys, and keys that
//! do not belong to the chosen kind, are rejected.

use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use super::expr::{Expr, Var};
use super::metric::{DerivativeMode, ExprMetric, Metric2D};
use super::{CurvatureProfile, GeometryError, ManifoldSpec, Scenario};

pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    ConstantCurvature,
    Metric2d,
    DirectProfile,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64, GeometryError> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expr(s) => Ok(Expr::parse_constant(s)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Derivatives {
    Symbolic,
    Central,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub g11: String,
    #[serde(default = "zero_expr")]
    pub g12: String,
    pub g22: String,
    pub derivatives: Option<Derivatives>,
    pub fd_step: Option<f64>,
}

fn zero_expr() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: Kind,
    pub dim: Option<usize>,
    pub kappa: Option<Scalar>,
    pub metric: Option<MetricSection>,
    pub profile: Option<Vec<Vec<String>>>,
    pub start: Option<[Scalar; 2]>,
    pub direction: Option<[Scalar; 2]>,
    pub length: Option<Scalar>,
    pub steps: Option<usize>,
}

fn err(msg: impl Into<String>) -> GeometryError {
    GeometryError::SpecFile(msg.into())
}

fn forbid(present: bool, key: &str, kind: &str) -> Result<(), GeometryError> {
    if present {
        Err(err(format!("key `{key}` is not allowed for kind `{kind}`")))
    } else {
        Ok(())
    }
}

fn pair(v: &[Scalar; 2]) -> Result<[f64; 2], GeometryError> {
    Ok([v[0].value()?, v[1].value()?])
}

impl SpecFile {
    pub fn from_toml(text: &str) -> Result<Self, GeometryError> {
        toml::from_str(text).map_err(|e| err(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(text).map_err(|e| err(e.to_string()))
    }

    pub fn into_scenario(self) -> Result<Scenario, GeometryError> {
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        if steps == 0 {
            return Err(err("`steps` must be positive"));
        }
        let length = self.length.as_ref().map(Scalar::value).transpose()?;
        match self.kind {
            Kind::ConstantCurvature => {
                let k = "constant-curvature";
                forbid(self.metric.is_some(), "metric", k)?;
                forbid(self.profile.is_some(), "profile", k)?;
                forbid(self.start.is_some(), "start", k)?;
                forbid(self.direction.is_some(), "direction", k)?;
                let dim = self.dim.unwrap_or(2);
                if dim < 2 {
                    return Err(err("`dim` must be at least 2"));
                }
                let kappa = self.kappa.ok_or_else(|| err("`kappa` is required"))?.value()?;
                Ok(Scenario {
                    spec: ManifoldSpec::ConstantCurvature { dim, kappa },
                    start: [0.0, 0.0],
                    direction: [1.0, 0.0],
                    length,
                    steps,
                })
            }
            Kind::Metric2d => {
                let k = "metric2d";
                forbid(self.kappa.is_some(), "kappa", k)?;
                forbid(self.profile.is_some(), "profile", k)?;
                if self.dim.is_some_and(|d| d != 2) {
                    return Err(err("metric2d requires `dim = 2`"));
                }
                let m = self.metric.ok_or_else(|| err("`[metric]` is required"))?;
                let mode = match (m.derivatives.unwrap_or(Derivatives::Symbolic), m.fd_step) {
                    (Derivatives::Symbolic, None) => DerivativeMode::ClosedForm,
                    (Derivatives::Symbolic, Some(_)) => {
                        return Err(err("`fd_step` only applies to central derivatives"))
                    }
                    (Derivatives::Central, None) => DerivativeMode::DEFAULT_CENTRAL,
                    (Derivatives::Central, Some(step)) if step > 0.0 => DerivativeMode::Central { step },
                    (Derivatives::Central, Some(step)) => {
                        return Err(err(format!("`fd_step` must be positive, got {step}")))
                    }
                };
                let field = ExprMetric::parse(&m.g11, &m.g12, &m.g22)?;
                let start = pair(self.start.as_ref().ok_or_else(|| err("`start` is required"))?)?;
                let direction = pair(
                    self.direction
                        .as_ref()
                        .ok_or_else(|| err("`direction` is required"))?,
                )?;
                Ok(Scenario {
                    spec: ManifoldSpec::Metric2D(Metric2D::new(std::sync::Arc::new(field), mode)),
                    start,
                    direction,
                    length,
                    steps,
                })
            }
            Kind::DirectProfile => {
                let k = "direct-profile";
                forbid(self.kappa.is_some(), "kappa", k)?;
                forbid(self.metric.is_some(), "metric", k)?;
                forbid(self.start.is_some(), "start", k)?;
                forbid(self.direction.is_some(), "direction", k)?;
                forbid(length.is_some(), "length", k)?;
                let rows = self.profile.ok_or_else(|| err("`profile` is required"))?;
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(err("`profile` must be a non-empty square matrix"));
                }
                if self.dim.is_some_and(|d| d != n) {
                    return Err(err(format!("`dim` does not match the {n}x{n} profile")));
                }
                let mut entries = Vec::with_capacity(n * n);
                for row in &rows {
                    for src in row {
                        let e = Expr::parse(src)?;
                        if e.mentions(Var::Y) {
                            return Err(err(format!("profile entry `{src}` may only use `x`")));
                        }
                        entries.push(e);
                    }
                }
                let profile = if entries.iter().all(|e| !e.mentions(Var::X)) {
                    CurvatureProfile::constant(DMatrix::from_fn(n, n, |i, j| entries[i * n + j].eval(0.0, 0.0)))
                } else {
                    CurvatureProfile::from_fn(n, move |x| {
                        DMatrix::from_fn(n, n, |i, j| entries[i * n + j].eval(x, 0.0))
                    })
                };
                Ok(Scenario {
                    spec: ManifoldSpec::DirectProfile(profile),
                    start: [0.0, 0.0],
                    direction: [1.0, 0.0],
                    length: None,
                    steps,
                })
            }
        }
    }
}

/// Parse a spec file, choosing JSON for `.json` paths and TOML otherwise.
pub fn load_spec(path: &Path) -> Result<Scenario, GeometryError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    let file = if path.extension().is_some_and(|e| e == "json") {
        SpecFile::from_json(&text)?
    } else {
        SpecFile::from_toml(&text)?
    };
    file.into_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_metric_file() {
        let s = SpecFile::from_toml(
            r#"
            kind = "metric2d"
            length = "2.5pi"
            start = ["pi/2", 0]
            direction = [0, 1]
            steps = 1000
            [metric]
            g11 = "1"
            g22 = "sin(x)^2"
            "#,
        )
        .unwrap()
        .into_scenario()
        .unwrap();
        assert_eq!(s.length, Some(2.5 * PI));
        assert_eq!(s.steps, 1000);
        let p = s.build().unwrap().profile;
        assert!((p.eval(0.5)[(0, 0)] - (2.5 * PI).powi(2)).abs() < 1e-8);
    }

    #[test]
    fn constant_curvature_file() {
        let s = SpecFile::from_toml("kind = \"constant-curvature\"\ndim = 3\nkappa = -1\nlength = 2")
            .unwrap()
            .into_scenario()
            .unwrap();
        let p = s.build().unwrap().profile;
        assert_eq!(p.eval(0.1), DMatrix::identity(2, 2) * -4.0);
    }

    #[test]
    fn direct_profile_file() {
        let s = SpecFile::from_json(r#"{"kind": "direct-profile", "profile": [["(2.5pi)^2", "0"], ["0", "x"]]}"#)
            .unwrap()
            .into_scenario()
            .unwrap();
        let p = s.build().unwrap().profile;
        assert_eq!(p.dim(), 2);
        assert_eq!(p.eval(0.25)[(1, 1)], 0.25);
    }

    #[test]
    fn strictness() {
        let bad = [
            "kind = \"constant-curvature\"\nkappa = 1\ncolour = 3",
            "kind = \"constant-curvature\"",
            "kind = \"constant-curvature\"\nkappa = 1\nstart = [0, 0]",
            "kind = \"torus\"",
            "kind = \"metric2d\"\nstart = [0, 1]\ndirection = [0, 1]\n[metric]\ng11 = \"1\"\ng22 = \"1\"\nextra = 1",
            "kind = \"metric2d\"\nstart = [0, 1]\ndirection = [0, 1]\n[metric]\ng11 = \"1\"\ng22 = \"1\"\nfd_step = 1e-4",
            "kind = \"direct-profile\"\nprofile = [[\"1\", \"2\"]]",
            "kind = \"direct-profile\"\nprofile = [[\"y\"]]",
            "kind = \"direct-profile\"\nprofile = [[\"1\"]]\nlength = 2",
        ];
        for text in bad {
            let r = SpecFile::from_toml(text).and_then(SpecFile::into_scenario);
            assert!(r.is_err(), "accepted:\n{text}");
        }
    }

    #[test]
    fn central_mode_from_file() {
        let s = SpecFile::from_toml(
            "kind = \"metric2d\"\nstart = [0, 1]\ndirection = [0, 1]\n[metric]\ng11 = \"1/y^2\"\ng22 = \"1/y^2\"\nderivatives = \"central\"",
        )
        .unwrap()
        .into_scenario()
        .unwrap();
        let ManifoldSpec::Metric2D(m) = &s.spec else { panic!() };
        assert_eq!(m.mode(), DerivativeMode::DEFAULT_CENTRAL);
    }
}
