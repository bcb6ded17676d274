//! Curvature profiles `S(x)` along geodesics.
//!
//! In a parallel orthonormal frame `{e¹, …}` along a geodesic `γ` on `[0, 1]`
//! the Jacobi operator becomes the symmetric matrix path
//! `S_ij(x) = g(R(γ′, eⁱ)γ′, eʲ)`. It is produced here either in closed form
//! for space forms, numerically for two-dimensional coordinate metrics, or
//! taken verbatim from the caller.

pub mod expr;
pub mod geodesic;
pub mod metric;
pub mod spec_file;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

pub use geodesic::{parallel_frame, shoot_geodesic, GeodesicRecord};
pub use metric::{DerivativeMode, ExprMetric, Metric2D, MetricField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is not positive definite at {point:?} (components {components:?})")]
    MetricDegenerate { point: [f64; 2], components: [f64; 3] },
    #[error("closed-form metric partials of order {order} are not available")]
    MissingPartials { order: u8 },
    #[error("frame construction met a vector of norm {norm:e}")]
    FrameDegenerate { norm: f64 },
    #[error("geodesic record carries no parallel frame")]
    MissingFrame,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Expr(#[from] expr::ExprError),
    #[error("spec file: {0}")]
    SpecFile(String),
}

type ProfileFn = dyn Fn(f64) -> DMatrix<f64> + Send + Sync;

#[derive(Clone)]
enum ProfileSource {
    Constant(DMatrix<f64>),
    Function(Arc<ProfileFn>),
}

/// Symmetric matrix path `x ↦ S(x)` on `[0, 1]`.
#[derive(Clone)]
pub struct CurvatureProfile {
    dim: usize,
    source: ProfileSource,
}

impl fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("CurvatureProfile");
        d.field("dim", &self.dim);
        match &self.source {
            ProfileSource::Constant(m) => d.field("constant", m),
            ProfileSource::Function(_) => d.field("constant", &Option::<()>::None),
        };
        d.finish()
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

impl CurvatureProfile {
    pub fn constant(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "curvature profile must be square");
        CurvatureProfile {
            dim: m.nrows(),
            source: ProfileSource::Constant(symmetrize(&m)),
        }
    }

    /// `S ≡ s·I_n`.
    pub fn scalar(n: usize, s: f64) -> Self {
        CurvatureProfile::constant(DMatrix::identity(n, n) * s)
    }

    pub fn zero(n: usize) -> Self {
        CurvatureProfile::constant(DMatrix::zeros(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        CurvatureProfile::constant(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        CurvatureProfile {
            dim,
            source: ProfileSource::Function(Arc::new(f)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant_value(&self) -> Option<&DMatrix<f64>> {
        match &self.source {
            ProfileSource::Constant(m) => Some(m),
            ProfileSource::Function(_) => None,
        }
    }

    /// `S(x)`, symmetric bit-for-bit.
    pub fn eval(&self, x: f64) -> DMatrix<f64> {
        match &self.source {
            ProfileSource::Constant(m) => m.clone(),
            ProfileSource::Function(f) => symmetrize(&f(x)),
        }
    }

    /// Largest spectral norm of `S` over `samples + 1` uniform points.
    pub fn sup_norm(&self, samples: usize) -> f64 {
        if let Some(m) = self.constant_value() {
            return spectral_norm(m);
        }
        (0..=samples)
            .map(|k| spectral_norm(&self.eval(k as f64 / samples as f64)))
            .fold(0.0, f64::max)
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0, |a: f64, e| a.max(e.abs()))
}

/// `x ↦ λ²·S(λx)`.
pub fn rescale_profile(profile: &CurvatureProfile, lambda: f64) -> CurvatureProfile {
    match &profile.source {
        ProfileSource::Constant(m) => CurvatureProfile::constant(m * (lambda * lambda)),
        ProfileSource::Function(_) => {
            let inner = profile.clone();
            CurvatureProfile::from_fn(profile.dim, move |x| inner.eval(lambda * x) * (lambda * lambda))
        }
    }
}

/// Geometric source of a curvature profile.
#[derive(Debug, Clone)]
pub enum ManifoldSpec {
    /// Space form of dimension `dim ≥ 2` and sectional curvature `kappa`.
    ConstantCurvature { dim: usize, kappa: f64 },
    Metric2D(Metric2D),
    DirectProfile(CurvatureProfile),
}

impl ManifoldSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ManifoldSpec::ConstantCurvature { .. } => "constant-curvature",
            ManifoldSpec::Metric2D(_) => "metric2d",
            ManifoldSpec::DirectProfile(_) => "direct-profile",
        }
    }
}

/// Curvature profile of a geodesic.
///
/// Space forms give `S ≡ c²κ·I_{dim−1}` and only use `geo.speed`. For
/// two-dimensional metrics `S(x) = [c²·K(γ(x))]` with `K` from the Brioschi
/// formula; the geodesic must carry a parallel frame and positions between
/// grid points come from cubic Hermite interpolation.
pub fn curvature_profile(
    spec: &ManifoldSpec,
    geo: &GeodesicRecord,
) -> Result<CurvatureProfile, GeometryError> {
    match spec {
        ManifoldSpec::ConstantCurvature { dim, kappa } => {
            if *dim < 2 {
                return Err(GeometryError::InvalidParameter(format!(
                    "manifold dimension must be at least 2, got {dim}"
                )));
            }
            Ok(CurvatureProfile::scalar(dim - 1, geo.speed * geo.speed * kappa))
        }
        ManifoldSpec::Metric2D(metric) => {
            if !geo.has_frame() {
                return Err(GeometryError::MissingFrame);
            }
            for &p in &geo.position {
                metric.gaussian_curvature(p)?;
            }
            let c2 = geo.speed * geo.speed;
            let metric = metric.clone();
            let geo = Arc::new(geo.clone());
            Ok(CurvatureProfile::from_fn(1, move |x| {
                let k = metric
                    .gaussian_curvature(geo.position_at(x.clamp(0.0, 1.0)))
                    .unwrap_or(f64::NAN);
                DMatrix::from_element(1, 1, c2 * k)
            }))
        }
        ManifoldSpec::DirectProfile(profile) => Ok(profile.clone()),
    }
}

/// A manifold plus the geodesic to analyse.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ManifoldSpec,
    /// Initial point (two-dimensional metrics only).
    pub start: [f64; 2],
    /// Initial velocity (two-dimensional metrics only).
    pub direction: [f64; 2],
    /// Geodesic length, i.e. the speed on the unit interval. For metrics it
    /// rescales `direction`; space forms default to 1.
    pub length: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub profile: CurvatureProfile,
    pub geodesic: Option<GeodesicRecord>,
}

impl Scenario {
    pub fn build(&self) -> Result<ScenarioOutput, GeometryError> {
        match &self.spec {
            ManifoldSpec::ConstantCurvature { .. } => {
                let geo = GeodesicRecord::unsampled(self.length.unwrap_or(1.0));
                Ok(ScenarioOutput {
                    profile: curvature_profile(&self.spec, &geo)?,
                    geodesic: None,
                })
            }
            ManifoldSpec::Metric2D(metric) => {
                let mut direction = self.direction;
                if let Some(length) = self.length {
                    let speed = metric.inner(self.start, direction, direction)?.sqrt();
                    if speed == 0.0 {
                        return Err(GeometryError::InvalidParameter("direction must be nonzero".into()));
                    }
                    direction = [direction[0] * length / speed, direction[1] * length / speed];
                }
                let geo = shoot_geodesic(metric, self.start, direction, self.steps)?;
                let geo = parallel_frame(metric, &geo)?;
                Ok(ScenarioOutput {
                    profile: curvature_profile(&self.spec, &geo)?,
                    geodesic: Some(geo),
                })
            }
            ManifoldSpec::DirectProfile(p) => Ok(ScenarioOutput {
                profile: p.clone(),
                geodesic: None,
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: ManifoldSpec,
    pub start: [f64; 2],
    /// Unit-speed initial velocity.
    pub direction: [f64; 2],
    pub default_length: f64,
}

impl CatalogEntry {
    pub fn scenario(&self, length: Option<f64>, steps: usize) -> Scenario {
        Scenario {
            spec: self.spec.clone(),
            start: self.start,
            direction: self.direction,
            length: Some(length.unwrap_or(self.default_length)),
            steps,
        }
    }

    /// Same entry in another dimension; only space forms can be resized.
    pub fn with_dim(&self, dim: usize) -> Option<CatalogEntry> {
        match self.spec {
            ManifoldSpec::ConstantCurvature { kappa, .. } => Some(CatalogEntry {
                spec: ManifoldSpec::ConstantCurvature { dim, kappa },
                ..self.clone()
            }),
            _ if dim == 2 => Some(self.clone()),
            _ => None,
        }
    }
}

fn expr_metric(g11: &str, g12: &str, g22: &str) -> Metric2D {
    let field = ExprMetric::parse(g11, g12, g22).expect("catalog metric expressions parse");
    Metric2D::new(Arc::new(field), DerivativeMode::ClosedForm)
}

/// Built-in test manifolds.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "flat",
            description: "Euclidean plane, kappa = 0",
            spec: ManifoldSpec::ConstantCurvature { dim: 2, kappa: 0.0 },
            start: [0.0, 0.0],
            direction: [1.0, 0.0],
            default_length: 1.0,
        },
        CatalogEntry {
            name: "sphere-constcurv",
            description: "round sphere, kappa = +1, closed-form profile",
            spec: ManifoldSpec::ConstantCurvature { dim: 2, kappa: 1.0 },
            start: [0.0, 0.0],
            direction: [1.0, 0.0],
            default_length: 2.5 * PI,
        },
        CatalogEntry {
            name: "hyperbolic-constcurv",
            description: "hyperbolic space, kappa = -1, closed-form profile",
            spec: ManifoldSpec::ConstantCurvature { dim: 2, kappa: -1.0 },
            start: [0.0, 0.0],
            direction: [1.0, 0.0],
            default_length: 1.0,
        },
        CatalogEntry {
            name: "halfplane-metric2d",
            description: "Poincare half-plane g = (dx^2 + dy^2)/y^2, vertical ray from (0, 1)",
            spec: ManifoldSpec::Metric2D(expr_metric("1/y^2", "0", "1/y^2")),
            start: [0.0, 1.0],
            direction: [0.0, 1.0],
            default_length: 1.0,
        },
        CatalogEntry {
            name: "sphere-metric2d",
            description: "round 2-sphere g = dθ^2 + sin^2θ dφ^2, equator from (π/2, 0)",
            spec: ManifoldSpec::Metric2D(expr_metric("1", "0", "sin(x)^2")),
            start: [FRAC_PI_2, 0.0],
            direction: [0.0, 1.0],
            default_length: 2.5 * PI,
        },
    ]
}

pub fn builtin(name: &str) -> Option<CatalogEntry> {
    builtin_catalog().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescaling() {
        let s = CurvatureProfile::scalar(1, 8.0);
        assert_eq!(rescale_profile(&s, 0.0).eval(0.3)[(0, 0)], 0.0);
        assert_eq!(rescale_profile(&s, 1.0).eval(0.3)[(0, 0)], 8.0);
        assert_eq!(rescale_profile(&s, 0.5).eval(0.3)[(0, 0)], 2.0);
        let f = CurvatureProfile::from_fn(1, |x| DMatrix::from_element(1, 1, x));
        assert!((rescale_profile(&f, 0.5).eval(0.8)[(0, 0)] - 0.25 * 0.4).abs() < 1e-16);
    }

    #[test]
    fn space_form_profiles() {
        let c = 2.5 * PI;
        let s = curvature_profile(
            &ManifoldSpec::ConstantCurvature { dim: 2, kappa: 1.0 },
            &GeodesicRecord::unsampled(c),
        )
        .unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.eval(0.5)[(0, 0)], c * c);
        let z = curvature_profile(
            &ManifoldSpec::ConstantCurvature { dim: 4, kappa: 0.0 },
            &GeodesicRecord::unsampled(3.0),
        )
        .unwrap();
        assert_eq!(z.eval(0.2), DMatrix::zeros(3, 3));
    }

    #[test]
    fn catalog_contents() {
        let cat = builtin_catalog();
        let sphere = cat.iter().find(|e| e.name == "sphere-constcurv").unwrap();
        assert!(matches!(sphere.spec, ManifoldSpec::ConstantCurvature { kappa, .. } if kappa == 1.0));
        assert!(cat.iter().any(|e| e.name == "halfplane-metric2d"));
        for e in &cat {
            let p = e.scenario(None, 1000).build().unwrap().profile;
            for k in 0..=10 {
                let s = p.eval(k as f64 / 10.0);
                assert_eq!(s, s.transpose());
            }
        }
    }

    #[test]
    fn halfplane_profile_is_minus_c_squared() {
        let e = builtin("halfplane-metric2d").unwrap();
        let out = e.scenario(Some(1.0), 1000).build().unwrap();
        for k in 0..=100 {
            let s = out.profile.eval(k as f64 / 100.0)[(0, 0)];
            assert!((s + 1.0).abs() < 1e-9, "{s}");
        }
    }

    #[test]
    fn metric_profile_needs_frame() {
        let e = builtin("sphere-metric2d").unwrap();
        let ManifoldSpec::Metric2D(m) = &e.spec else { unreachable!() };
        let geo = shoot_geodesic(m, e.start, e.direction, 100).unwrap();
        assert_eq!(curvature_profile(&e.spec, &geo).unwrap_err(), GeometryError::MissingFrame);
    }
}
