//! Two-dimensional coordinate metrics: derivatives, Christoffel symbols and
//! Gaussian curvature.

use std::fmt;
use std::sync::Arc;

use super::expr::{Expr, Var};
use super::GeometryError;

/// Components `(g₁₁, g₁₂, g₂₂)` of a metric on a coordinate patch, with
/// optional closed-form partials.
pub trait MetricField: Send + Sync {
    fn components(&self, p: [f64; 2]) -> [f64; 3];

    /// `[∂ₓ, ∂ᵧ]` of each component.
    fn first_partials(&self, _p: [f64; 2]) -> Option<[[f64; 3]; 2]> {
        None
    }

    /// `[∂ₓₓ, ∂ₓᵧ, ∂ᵧᵧ]` of each component.
    fn second_partials(&self, _p: [f64; 2]) -> Option<[[f64; 3]; 3]> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    ClosedForm,
    Central { step: f64 },
}

impl DerivativeMode {
    /// Central differences at `h = 1e-4`, where truncation and roundoff of the
    /// second difference quotient balance at roughly `1e-8`.
    pub const DEFAULT_CENTRAL: DerivativeMode = DerivativeMode::Central { step: 1e-4 };
}

/// Value and derivatives of the metric at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub g: [f64; 3],
    pub d: [[f64; 3]; 2],
    pub dd: [[f64; 3]; 3],
}

#[derive(Clone)]
pub struct Metric2D {
    field: Arc<dyn MetricField>,
    mode: DerivativeMode,
}

impl fmt::Debug for Metric2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Metric2D").field("mode", &self.mode).finish_non_exhaustive()
    }
}

pub(crate) fn gram(g: [f64; 3]) -> [[f64; 2]; 2] {
    [[g[0], g[1]], [g[1], g[2]]]
}

impl Metric2D {
    pub fn new(field: Arc<dyn MetricField>, mode: DerivativeMode) -> Self {
        Metric2D { field, mode }
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn with_mode(&self, mode: DerivativeMode) -> Self {
        Metric2D {
            field: Arc::clone(&self.field),
            mode,
        }
    }

    /// Metric components, checked positive definite.
    pub fn components(&self, p: [f64; 2]) -> Result<[f64; 3], GeometryError> {
        let g = self.field.components(p);
        let det = g[0] * g[2] - g[1] * g[1];
        if !(g[0] > 0.0 && det > 0.0) || g.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::MetricDegenerate { point: p, components: g });
        }
        Ok(g)
    }

    pub fn inner(&self, p: [f64; 2], u: [f64; 2], v: [f64; 2]) -> Result<f64, GeometryError> {
        let g = self.components(p)?;
        Ok(g[0] * u[0] * v[0] + g[1] * (u[0] * v[1] + u[1] * v[0]) + g[2] * u[1] * v[1])
    }

    fn first_partials(&self, p: [f64; 2]) -> Result<[[f64; 3]; 2], GeometryError> {
        match self.mode {
            DerivativeMode::ClosedForm => self
                .field
                .first_partials(p)
                .ok_or(GeometryError::MissingPartials { order: 1 }),
            DerivativeMode::Central { step: h } => {
                let mut out = [[0.0; 3]; 2];
                for (axis, row) in out.iter_mut().enumerate() {
                    let mut fwd = p;
                    let mut bwd = p;
                    fwd[axis] += h;
                    bwd[axis] -= h;
                    let (a, b) = (self.components(fwd)?, self.components(bwd)?);
                    for c in 0..3 {
                        row[c] = (a[c] - b[c]) / (2.0 * h);
                    }
                }
                Ok(out)
            }
        }
    }

    fn second_partials(&self, p: [f64; 2]) -> Result<[[f64; 3]; 3], GeometryError> {
        match self.mode {
            DerivativeMode::ClosedForm => self
                .field
                .second_partials(p)
                .ok_or(GeometryError::MissingPartials { order: 2 }),
            DerivativeMode::Central { step: h } => {
                let at = |dx: f64, dy: f64| self.components([p[0] + dx, p[1] + dy]);
                let c0 = at(0.0, 0.0)?;
                let (xp, xm, yp, ym) = (at(h, 0.0)?, at(-h, 0.0)?, at(0.0, h)?, at(0.0, -h)?);
                let (pp, pm, mp, mm) = (at(h, h)?, at(h, -h)?, at(-h, h)?, at(-h, -h)?);
                let mut out = [[0.0; 3]; 3];
                for c in 0..3 {
                    out[0][c] = (xp[c] - 2.0 * c0[c] + xm[c]) / (h * h);
                    out[1][c] = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
                    out[2][c] = (yp[c] - 2.0 * c0[c] + ym[c]) / (h * h);
                }
                Ok(out)
            }
        }
    }

    pub fn jet(&self, p: [f64; 2]) -> Result<MetricJet, GeometryError> {
        Ok(MetricJet {
            g: self.components(p)?,
            d: self.first_partials(p)?,
            dd: self.second_partials(p)?,
        })
    }

    /// `Γᵏᵢⱼ` indexed `[k][i][j]`.
    pub fn christoffel(&self, p: [f64; 2]) -> Result<[[[f64; 2]; 2]; 2], GeometryError> {
        let g = gram(self.components(p)?);
        let d = self.first_partials(p)?;
        let dg = [gram(d[0]), gram(d[1])];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for (k, gk) in gamma.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    gk[i][j] = (0..2)
                        .map(|l| 0.5 * inv[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]))
                        .sum();
                }
            }
        }
        Ok(gamma)
    }

    /// Gaussian curvature from the Brioschi formula.
    pub fn gaussian_curvature(&self, p: [f64; 2]) -> Result<f64, GeometryError> {
        Ok(brioschi(&self.jet(p)?))
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `K = (det A − det B) / (EG − F²)²` with `E = g₁₁`, `F = g₁₂`, `G = g₂₂`
/// and coordinates `(u, v) = (x, y)`.
pub fn brioschi(jet: &MetricJet) -> f64 {
    let [e, f, g] = jet.g;
    let [[e_u, f_u, g_u], [e_v, f_v, g_v]] = jet.d;
    let [[_, _, g_uu], [_, f_uv, _], [e_vv, _, _]] = jet.dd;
    let a = [
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, e, f],
        [0.5 * g_v, f, g],
    ];
    let b = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, g]];
    let w = e * g - f * f;
    (det3(a) - det3(b)) / (w * w)
}

/// Metric given by three expressions in `x, y`, with symbolic partials.
#[derive(Debug, Clone)]
pub struct ExprMetric {
    components: [Expr; 3],
    first: [[Expr; 3]; 2],
    second: [[Expr; 3]; 3],
}

impl ExprMetric {
    pub fn new(g11: Expr, g12: Expr, g22: Expr) -> Self {
        let components = [g11, g12, g22];
        let d = |v: Var| -> [Expr; 3] { std::array::from_fn(|c| components[c].derivative(v)) };
        let first = [d(Var::X), d(Var::Y)];
        let second = [
            std::array::from_fn(|c| first[0][c].derivative(Var::X)),
            std::array::from_fn(|c| first[0][c].derivative(Var::Y)),
            std::array::from_fn(|c| first[1][c].derivative(Var::Y)),
        ];
        ExprMetric {
            components,
            first,
            second,
        }
    }

    pub fn parse(g11: &str, g12: &str, g22: &str) -> Result<Self, super::expr::ExprError> {
        Ok(ExprMetric::new(Expr::parse(g11)?, Expr::parse(g12)?, Expr::parse(g22)?))
    }
}

impl MetricField for ExprMetric {
    fn components(&self, p: [f64; 2]) -> [f64; 3] {
        std::array::from_fn(|c| self.components[c].eval(p[0], p[1]))
    }

    fn first_partials(&self, p: [f64; 2]) -> Option<[[f64; 3]; 2]> {
        Some(std::array::from_fn(|a| std::array::from_fn(|c| self.first[a][c].eval(p[0], p[1]))))
    }

    fn second_partials(&self, p: [f64; 2]) -> Option<[[f64; 3]; 3]> {
        Some(std::array::from_fn(|a| std::array::from_fn(|c| self.second[a][c].eval(p[0], p[1]))))
    }
}
