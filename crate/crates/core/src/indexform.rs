//! Galerkin discretization of the index form
//! `q_λ(u) = ∫₀¹ |u′|² − λ²⟨S(λx)u, u⟩ dx` on `H¹₀([0,1], ℝⁿ)`.
//!
//! In the sine basis `b_{k,i} = √2/(kπ)·sin(kπx)·eᵢ`, orthonormal for
//! `⟨u′, v′⟩`, the form has matrix `I + K_λ`, so the Morse index of the
//! geodesic is the number of negative eigenvalues of a dense symmetric
//! matrix. The `S` entries only enter through the cosine moments
//! `M_ij(m) = ∫ S_ij(λx) cos(mπx) dx`, since
//! `2 sin(kπx) sin(lπx) = cos((k−l)πx) − cos((k+l)πx)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::geometry::CurvatureProfile;
use crate::jacobi::{self, ConjugateReport, JacobiError, JacobiSolution};
use crate::spectral::{self, Crossing, CrossingParams, FnPath, SpectralError, SymMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexFormError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("geodesic is degenerate: the endpoint is conjugate to the start")]
    DegenerateGeodesic,
    #[error("lambda={lambda} is not a crossing at the given tolerance")]
    NotACrossing { lambda: f64 },
    #[error("crossing form is not negative at lambda={lambda}: value {value}")]
    NonNegativeCrossingForm { lambda: f64, value: f64 },
    #[error("crossing form at lambda={lambda}: closed form {closed} disagrees with finite difference {fd}")]
    OracleMismatch { lambda: f64, closed: f64, fd: f64 },
    #[error("index of q_0 is {0}, expected 0")]
    NonzeroReferenceIndex(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
}

pub const DEFAULT_MODES: usize = 128;
pub const DEFAULT_QUAD_PANELS: usize = 4096;
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Relative tolerance between the closed crossing form and its oracle.
pub const ORACLE_RTOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalerkinBasis {
    /// Fiber dimension.
    pub n: usize,
    /// Sine modes per fiber direction.
    pub modes: usize,
    /// Composite Simpson panels on `[0, 1]`.
    pub quad_panels: usize,
}

impl GalerkinBasis {
    pub fn new(n: usize, modes: usize, quad_panels: usize) -> Result<Self, IndexFormError> {
        if n == 0 || modes == 0 || quad_panels == 0 {
            return Err(IndexFormError::InvalidParameter(format!(
                "basis needs positive n, modes and panels, got ({n}, {modes}, {quad_panels})"
            )));
        }
        Ok(GalerkinBasis { n, modes, quad_panels })
    }

    pub fn with_defaults(n: usize) -> Self {
        GalerkinBasis {
            n,
            modes: DEFAULT_MODES,
            quad_panels: DEFAULT_QUAD_PANELS,
        }
    }

    /// Size of the assembled matrix.
    pub fn dim(&self) -> usize {
        self.n * self.modes
    }

    /// Row of `b_{k,i}`, `k` starting at 1.
    pub fn index(&self, k: usize, i: usize) -> usize {
        (k - 1) * self.n + i
    }

    /// Largest deviation of the quadrature Gram matrix `∫ b_k′ b_l′` from
    /// the identity, per fiber direction.
    pub fn self_test(&self) -> f64 {
        let rule = Simpson::new(self.quad_panels);
        let ones = vec![1.0; rule.len()];
        let m = rule.cosine_moments(&ones, 2 * self.modes);
        let mut worst: f64 = 0.0;
        for k in 1..=self.modes {
            for l in 1..=self.modes {
                // b_k′ b_l′ = 2 cos(kπx) cos(lπx)
                let g = m[k.abs_diff(l)] + m[k + l];
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Composite Simpson rule with `2P + 1` nodes on `[0, 1]`.
struct Simpson {
    panels: usize,
    /// `cos(πj / 2P)` for `j` in `0..4P`.
    cos_table: Vec<f64>,
}

impl Simpson {
    fn new(panels: usize) -> Self {
        let period = 4 * panels;
        let cos_table = (0..period)
            .map(|j| (PI * j as f64 / (2 * panels) as f64).cos())
            .collect();
        Simpson { panels, cos_table }
    }

    fn len(&self) -> usize {
        2 * self.panels + 1
    }

    fn node(&self, q: usize) -> f64 {
        q as f64 / (2 * self.panels) as f64
    }

    fn weight(&self, q: usize) -> f64 {
        let h = 1.0 / (2 * self.panels) as f64;
        let c = if q == 0 || q == 2 * self.panels {
            1.0
        } else if q % 2 == 1 {
            4.0
        } else {
            2.0
        };
        c * h / 3.0
    }

    fn integrate(&self, values: impl Iterator<Item = f64>) -> f64 {
        values.enumerate().map(|(q, v)| self.weight(q) * v).sum()
    }

    /// `∫ f(x) cos(mπx) dx` for `m` in `0..=max_m`, with `f` sampled at the nodes.
    fn cosine_moments(&self, f: &[f64], max_m: usize) -> Vec<f64> {
        let period = self.cos_table.len();
        let wf: Vec<f64> = f.iter().enumerate().map(|(q, v)| self.weight(q) * v).collect();
        (0..=max_m)
            .map(|m| {
                let step = m % period;
                let mut phase = 0usize;
                let mut acc = 0.0;
                for w in &wf {
                    acc += w * self.cos_table[phase];
                    phase += step;
                    if phase >= period {
                        phase -= period;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Reusable assembly of `q_λ` matrices for one basis.
///
/// Holds the Simpson-weighted cosines `w_q cos(mπx_q)` so that every moment
/// of every entry of `S` comes out of one matrix product.
pub struct Assembler {
    basis: GalerkinBasis,
    rule: Simpson,
    weighted_cos: DMatrix<f64>,
}

impl Assembler {
    pub fn new(basis: GalerkinBasis) -> Self {
        let rule = Simpson::new(basis.quad_panels);
        let period = rule.cos_table.len();
        let weighted_cos = DMatrix::from_fn(2 * basis.modes + 1, rule.len(), |m, q| {
            rule.weight(q) * rule.cos_table[(m * q) % period]
        });
        Assembler {
            basis,
            rule,
            weighted_cos,
        }
    }

    pub fn basis(&self) -> &GalerkinBasis {
        &self.basis
    }

    /// Matrix of `q_λ` in the sine basis, `I + K_λ`.
    pub fn assemble(&self, profile: &CurvatureProfile, lambda: f64) -> Result<SymMatrix, IndexFormError> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(IndexFormError::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        let basis = &self.basis;
        let n = basis.n;
        if profile.dim() != n {
            return Err(IndexFormError::InvalidParameter(format!(
                "profile has dimension {}, basis has {n}",
                profile.dim()
            )));
        }
        let size = basis.dim();
        let mut g = DMatrix::identity(size, size);
        if lambda == 0.0 {
            return Ok(SymMatrix::new(g));
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let nodes = self.rule.len();
        let values = match profile.constant_value() {
            Some(s) => DMatrix::from_fn(nodes, pairs.len(), |_, p| s[pairs[p]]),
            None => {
                let mut v = DMatrix::zeros(nodes, pairs.len());
                for q in 0..nodes {
                    let s = profile.eval(lambda * self.rule.node(q));
                    for (p, &ij) in pairs.iter().enumerate() {
                        v[(q, p)] = s[ij];
                    }
                }
                v
            }
        };
        // moments[(m, pair)] = ∫ S_ij(λx) cos(mπx) dx
        let moments = &self.weighted_cos * values;
        let mut pair_of = vec![0usize; n * n];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            pair_of[i * n + j] = p;
            pair_of[j * n + i] = p;
        }
        let l2 = lambda * lambda;
        for k in 1..=basis.modes {
            for l in 1..=basis.modes {
                let scale = l2 * 2.0 / (k as f64 * l as f64 * PI * PI);
                for i in 0..n {
                    for j in 0..n {
                        let p = pair_of[i * n + j];
                        let integral = 0.5 * (moments[(k.abs_diff(l), p)] - moments[(k + l, p)]);
                        g[(basis.index(k, i), basis.index(l, j))] -= scale * integral;
                    }
                }
            }
        }
        Ok(SymMatrix::new(g))
    }
}

/// Matrix of `q_λ` in the sine basis, `I + K_λ`.
pub fn assemble(profile: &CurvatureProfile, lambda: f64, basis: &GalerkinBasis) -> Result<SymMatrix, IndexFormError> {
    Assembler::new(*basis).assemble(profile, lambda)
}

/// Morse index of `q_λ` on the Galerkin subspace.
pub fn galerkin_index(
    profile: &CurvatureProfile,
    lambda: f64,
    basis: &GalerkinBasis,
    zero_tol: f64,
) -> Result<usize, IndexFormError> {
    Ok(spectral::morse_index(&assemble(profile, lambda, basis)?, zero_tol)?)
}

/// `q̇_{λ₀}(u) = −(1/λ₀)‖u′(1)‖²` on each kernel field of `L_{λ₀}`.
pub fn crossing_form_closed(sol: &JacobiSolution, lambda0: f64, kernel_tol: f64) -> Result<Vec<f64>, IndexFormError> {
    let fields = kernel_fields(sol, lambda0, kernel_tol)?;
    Ok(fields
        .iter()
        .map(|f| -f.u_prime_end.iter().map(|d| d * d).sum::<f64>() / lambda0)
        .collect())
}

fn kernel_fields(sol: &JacobiSolution, lambda0: f64, kernel_tol: f64) -> Result<Vec<jacobi::KernelField>, IndexFormError> {
    match jacobi::kernel_fields(sol, lambda0, kernel_tol) {
        Err(JacobiError::NotAConjugateInstant { t }) => Err(IndexFormError::NotACrossing { lambda: t }),
        other => Ok(other?),
    }
}

/// `q_λ(u)` by Simpson quadrature, `u` and `u′` sampled at the rule's nodes.
fn index_form_value(
    profile: &CurvatureProfile,
    lambda: f64,
    rule: &Simpson,
    u: &[DVector<f64>],
    du: &[DVector<f64>],
) -> f64 {
    let l2 = lambda * lambda;
    rule.integrate((0..rule.len()).map(|q| {
        let s = profile.eval(lambda * rule.node(q));
        du[q].norm_squared() - l2 * (&s * &u[q]).dot(&u[q])
    }))
}

/// Symmetric difference `[q_{λ₀+h}(u) − q_{λ₀−h}(u)] / 2h` on each kernel
/// field `u(x) = J(λ₀x)v`, with `h` shrunk to stay inside `(0, 1)`.
pub fn crossing_form_fd(
    sol: &JacobiSolution,
    lambda0: f64,
    kernel_tol: f64,
    h: f64,
    quad_panels: usize,
) -> Result<Vec<f64>, IndexFormError> {
    if !(h > 0.0) || quad_panels == 0 {
        return Err(IndexFormError::InvalidParameter(format!(
            "need positive step and panels, got h={h}, panels={quad_panels}"
        )));
    }
    let h = h.min(0.5 * lambda0).min(0.5 * (1.0 - lambda0));
    let fields = kernel_fields(sol, lambda0, kernel_tol)?;
    let rule = Simpson::new(quad_panels);
    let states: Vec<_> = (0..rule.len()).map(|q| sol.state_at(lambda0 * rule.node(q))).collect();
    Ok(fields
        .iter()
        .map(|f| {
            let v = DVector::from_column_slice(&f.v);
            let u: Vec<DVector<f64>> = states.iter().map(|(j, _)| j * &v).collect();
            let du: Vec<DVector<f64>> = states.iter().map(|(_, jp)| jp * &v * lambda0).collect();
            let plus = index_form_value(sol.profile(), lambda0 + h, &rule, &u, &du);
            let minus = index_form_value(sol.profile(), lambda0 - h, &rule, &u, &du);
            (plus - minus) / (2.0 * h)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub steps: usize,
    pub kernel_tol: f64,
    pub zero_tol: f64,
    pub fd_step: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            steps: jacobi::DEFAULT_STEPS,
            kernel_tol: jacobi::DEFAULT_KERNEL_TOL,
            zero_tol: DEFAULT_ZERO_TOL,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingDiagnostic {
    pub lambda0: f64,
    pub multiplicity: usize,
    pub closed_form: Vec<f64>,
    pub finite_difference: Vec<f64>,
    pub signature: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub mu_galerkin: usize,
    pub conjugate_total: usize,
    pub crossing_signature_sum: i64,
    pub agree: bool,
    pub diagnostics: Vec<CrossingDiagnostic>,
}

/// The three sides of the index theorem for one profile: the Galerkin
/// index of `q₁`, the conjugate count, and minus the sum of crossing
/// signatures along `λ ↦ q_λ` from `q₀`.
pub fn verify_theorem(
    profile: &CurvatureProfile,
    basis: &GalerkinBasis,
    params: &VerifyParams,
) -> Result<IndexReport, IndexFormError> {
    let sol = jacobi::solve_jacobi(profile, params.steps)?;
    let conj = jacobi::conjugate_points(&sol, params.kernel_tol)?;
    verify_with_solution(profile, &sol, &conj, basis, params)
}

/// [`verify_theorem`] with the Jacobi leg already computed.
pub fn verify_with_solution(
    profile: &CurvatureProfile,
    sol: &JacobiSolution,
    conj: &ConjugateReport,
    basis: &GalerkinBasis,
    params: &VerifyParams,
) -> Result<IndexReport, IndexFormError> {
    if !conj.nondegenerate {
        return Err(IndexFormError::DegenerateGeodesic);
    }
    let mu0 = galerkin_index(profile, 0.0, basis, params.zero_tol)?;
    if mu0 != 0 {
        return Err(IndexFormError::NonzeroReferenceIndex(mu0));
    }
    let mu_galerkin = galerkin_index(profile, 1.0, basis, params.zero_tol)?;

    let mut diagnostics = Vec::with_capacity(conj.points.len());
    for p in &conj.points {
        let closed = crossing_form_closed(sol, p.t, params.kernel_tol)?;
        let fd = crossing_form_fd(sol, p.t, params.kernel_tol, params.fd_step, basis.quad_panels)?;
        for (&c, &f) in closed.iter().zip(&fd) {
            if !(c < 0.0) {
                return Err(IndexFormError::NonNegativeCrossingForm { lambda: p.t, value: c });
            }
            if (c - f).abs() > ORACLE_RTOL * c.abs().max(1e-6) {
                return Err(IndexFormError::OracleMismatch {
                    lambda: p.t,
                    closed: c,
                    fd: f,
                });
            }
        }
        diagnostics.push(CrossingDiagnostic {
            lambda0: p.t,
            multiplicity: p.multiplicity,
            closed_form: closed,
            finite_difference: fd,
            // negative definite on the kernel
            signature: -(p.multiplicity as i64),
        });
    }
    let crossing_signature_sum: i64 = diagnostics.iter().map(|d| d.signature).sum();
    let agree = mu_galerkin == conj.total && conj.total as i64 == -crossing_signature_sum;
    Ok(IndexReport {
        mu_galerkin,
        conjugate_total: conj.total,
        crossing_signature_sum,
        agree,
        diagnostics,
    })
}

/// Crossings of the Galerkin path `λ ↦ assemble(S, λ)`.
pub fn galerkin_crossings(
    profile: &CurvatureProfile,
    basis: &GalerkinBasis,
    params: &CrossingParams,
) -> Result<Vec<Crossing>, IndexFormError> {
    let assembler = Assembler::new(*basis);
    assembler.assemble(profile, 0.0)?;
    let path = FnPath::new(basis.dim(), |l| {
        assembler.assemble(profile, l).expect("lambda and dimension validated")
    });
    Ok(spectral::find_crossings(&path, params)?)
}

/// Scan settings for [`galerkin_crossings`]: Galerkin kernels are only
/// resolved to the slope of the eigenvalues times the bisection width, so
/// the kernel tolerance is looser than for generic paths.
pub fn galerkin_crossing_params(execution: Execution) -> CrossingParams {
    CrossingParams {
        grid_size: 128,
        kernel_tol: 1e-6,
        regularity_tol: 1e-6,
        fd_step: 1e-5,
        bisection_width: 1e-10,
        execution,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Identification {
    /// `(λ₀, Galerkin kernel dim, conjugate t, multiplicity)` per matched pair.
    pub pairs: Vec<(f64, usize, f64, usize)>,
    pub max_offset: f64,
    pub matches: bool,
}

/// Pair Galerkin crossings with conjugate instants in order.
pub fn identify(galerkin: &[Crossing], conj: &ConjugateReport, tol: f64) -> Identification {
    let pairs: Vec<_> = galerkin
        .iter()
        .zip(&conj.points)
        .map(|(c, p)| (c.lambda0, c.kernel_dim(), p.t, p.multiplicity))
        .collect();
    let max_offset = pairs.iter().map(|p| (p.0 - p.2).abs()).fold(0.0, f64::max);
    let matches = galerkin.len() == conj.points.len()
        && pairs.iter().all(|p| (p.0 - p.2).abs() <= tol && p.1 == p.3);
    Identification {
        pairs,
        max_offset,
        matches,
    }
}

/// Eigenvalues of `assemble(S, 1) − I` ordered by decreasing magnitude.
pub fn compact_part_spectrum(profile: &CurvatureProfile, basis: &GalerkinBasis) -> Result<Vec<f64>, IndexFormError> {
    let g = assemble(profile, 1.0, basis)?;
    let mut ev: Vec<f64> = g.eigenvalues().into_iter().map(|e| e - 1.0).collect();
    ev.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    Ok(ev)
}

/// `C` in `p²·|ev_p| ≤ C`: with `‖S‖ ≤ s`, min-max against the embedding
/// `H¹₀ ⊂ L²` gives `C = 4n²s/π²`.
pub fn compactness_constant(n: usize, sup_norm: f64) -> f64 {
    4.0 * (n * n) as f64 * sup_norm / (PI * PI)
}
