//! Jacobi fields of `u″ + S(x)u = 0` and conjugate instants.
//!
//! The matrix solution `J` with `J(0) = 0`, `J′(0) = I` carries every Jacobi
//! field vanishing at `0` as a column combination `J(t)v`, so `t` is
//! conjugate exactly when `J(t)` is singular and `m(t) = dim ker J(t)`.
//!
//! Conjugate instants are counted with the matrix Prüfer angle. Since
//! `JᵀJ′` is symmetric, `W = J + iJ′` is invertible and
//! `U = W·W̄⁻¹` is unitary with eigenvalue `−1` exactly on `ker J`. Those
//! eigenphases only ever pass `π` in the negative direction, so with `Φ` a
//! continuous branch of `arg det W` starting at `nπ/2`,
//! `N(t) = (Σ arg eig U(t) − 2Φ(t)) / 2π` is the number of conjugate
//! instants in `(0, t)` counted with multiplicity. Cells of the grid where
//! `N` grows are bisected on `N` itself.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::CurvatureProfile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobiError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("t={t} is not a conjugate instant at the given tolerance")]
    NotAConjugateInstant { t: f64 },
    #[error(
        "unresolved conjugate cluster near t={t}: count jumps by {expected} \
         but the kernel has dimension {found}"
    )]
    UnresolvedCluster { t: f64, expected: usize, found: usize },
    #[error("numerical resolution failure: {0}")]
    Resolution(String),
}

/// Default tolerance on the singular values of `J` against the frame `[J; J′]`.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-7;
pub const DEFAULT_STEPS: usize = 2000;
/// Conjugate instants closer than this to `1` make the geodesic degenerate.
pub const ENDPOINT_MARGIN: f64 = 1e-9;
const LOCALIZATION_WIDTH: f64 = 1e-10;

/// Matrix solution `(J, J′)` on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone)]
pub struct JacobiSolution {
    profile: CurvatureProfile,
    pub grid: Vec<f64>,
    pub j: Vec<DMatrix<f64>>,
    pub jp: Vec<DMatrix<f64>>,
}

fn rk4_step(
    profile: &CurvatureProfile,
    t: f64,
    h: f64,
    j: &DMatrix<f64>,
    jp: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let s0 = profile.eval(t);
    let sm = profile.eval(t + 0.5 * h);
    let s1 = profile.eval(t + h);
    let k1j = jp.clone();
    let k1p = -(&s0 * j);
    let j2 = j + &k1j * (0.5 * h);
    let p2 = jp + &k1p * (0.5 * h);
    let k2p = -(&sm * &j2);
    let k2j = p2;
    let j3 = j + &k2j * (0.5 * h);
    let p3 = jp + &k2p * (0.5 * h);
    let k3p = -(&sm * &j3);
    let k3j = p3;
    let j4 = j + &k3j * h;
    let p4 = jp + &k3p * h;
    let k4p = -(&s1 * &j4);
    let k4j = p4;
    let w = h / 6.0;
    (
        j + (k1j + k2j * 2.0 + k3j * 2.0 + k4j) * w,
        jp + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * w,
    )
}

/// RK4 with fixed step `1/steps` on `(J, J′)′ = (J′, −SJ)`.
pub fn solve_jacobi(profile: &CurvatureProfile, steps: usize) -> Result<JacobiSolution, JacobiError> {
    if steps < 100 {
        return Err(JacobiError::InvalidParameter(format!(
            "at least 100 steps are required, got {steps}"
        )));
    }
    let n = profile.dim();
    let h = 1.0 / steps as f64;
    let mut sol = JacobiSolution {
        profile: profile.clone(),
        grid: Vec::with_capacity(steps + 1),
        j: Vec::with_capacity(steps + 1),
        jp: Vec::with_capacity(steps + 1),
    };
    let mut j = DMatrix::zeros(n, n);
    let mut jp = DMatrix::identity(n, n);
    for i in 0..=steps {
        let t = i as f64 * h;
        sol.grid.push(t);
        if i < steps {
            let next = rk4_step(profile, t, h, &j, &jp);
            sol.j.push(j);
            sol.jp.push(jp);
            (j, jp) = next;
        } else {
            sol.j.push(j.clone());
            sol.jp.push(jp.clone());
        }
    }
    Ok(sol)
}

impl JacobiSolution {
    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    pub fn steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    fn cell(&self, t: f64) -> usize {
        let steps = self.steps();
        ((t * steps as f64).floor().max(0.0) as usize).min(steps - 1)
    }

    /// `(J(t), J′(t))`: one RK4 step from the grid point at or below `t`.
    pub fn state_at(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let i = self.cell(t);
        let dt = t - self.grid[i];
        if dt == 0.0 {
            return (self.j[i].clone(), self.jp[i].clone());
        }
        rk4_step(&self.profile, self.grid[i], dt, &self.j[i], &self.jp[i])
    }

    /// Largest entry of `J′ᵀJ − JᵀJ′` over the grid.
    pub fn wronskian_defect(&self) -> f64 {
        self.j
            .iter()
            .zip(&self.jp)
            .map(|(j, jp)| (jp.transpose() * j - j.transpose() * jp).amax())
            .fold(0.0, f64::max)
    }

    /// Continuous branch of `arg det(J + iJ′)` at every grid point.
    fn lifted_phase(&self) -> Result<Vec<f64>, JacobiError> {
        let n = self.dim();
        let mut out = Vec::with_capacity(self.grid.len());
        let mut lifted = n as f64 * PI / 2.0;
        let mut prev = principal_phase(&self.j[0], &self.jp[0]);
        out.push(lifted);
        for i in 1..self.grid.len() {
            let cur = principal_phase(&self.j[i], &self.jp[i]);
            let delta = wrap(cur - prev);
            if delta.abs() > PI / 2.0 {
                return Err(JacobiError::Resolution(format!(
                    "phase of det(J + iJ') moves {delta:.3} rad in one step near t={}; increase steps",
                    self.grid[i]
                )));
            }
            lifted += delta;
            prev = cur;
            out.push(lifted);
        }
        Ok(out)
    }

    /// Number of conjugate instants in `(0, t_i)` at every grid point `t_i`.
    pub fn counting_function(&self) -> Result<Vec<usize>, JacobiError> {
        let phase = self.lifted_phase()?;
        let mut counts = vec![0usize];
        for i in 1..self.grid.len() {
            counts.push(count_from_phase(&self.j[i], &self.jp[i], phase[i], self.grid[i])?);
        }
        Ok(counts)
    }

    fn count_at(&self, t: f64, phase: &[f64]) -> Result<usize, JacobiError> {
        let i = self.cell(t);
        let (j, jp) = self.state_at(t);
        let base = principal_phase(&self.j[i], &self.jp[i]);
        let lifted = phase[i] + wrap(principal_phase(&j, &jp) - base);
        count_from_phase(&j, &jp, lifted, t)
    }

    /// Per-grid diagnostics `(t, det J, σ_min, count)` for plotting, with
    /// `σ_min` measured against the frame `[J; J′]`.
    pub fn trace(&self) -> Result<Vec<TraceSample>, JacobiError> {
        let counts = self.counting_function()?;
        Ok(self
            .grid
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let (_, svd) = frame_svd(&self.j[i], &self.jp[i]);
                TraceSample {
                    t,
                    det_j: self.j[i].determinant(),
                    sigma_min: svd.singular_values.min(),
                    count: counts[i],
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub det_j: f64,
    pub sigma_min: f64,
    pub count: usize,
}

fn wrap(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

fn complex_frame(j: &DMatrix<f64>, jp: &DMatrix<f64>, sign: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(j.nrows(), j.ncols(), |r, c| Complex64::new(j[(r, c)], sign * jp[(r, c)]))
}

fn principal_phase(j: &DMatrix<f64>, jp: &DMatrix<f64>) -> f64 {
    complex_frame(j, jp, 1.0).determinant().arg()
}

fn count_from_phase(j: &DMatrix<f64>, jp: &DMatrix<f64>, lifted: f64, t: f64) -> Result<usize, JacobiError> {
    let w = complex_frame(j, jp, 1.0);
    let w_bar = complex_frame(j, jp, -1.0);
    let inv = w_bar
        .try_inverse()
        .ok_or_else(|| JacobiError::Resolution(format!("J - iJ' is singular at t={t}")))?;
    let u = w * inv;
    let eig = nalgebra::linalg::Schur::new(u)
        .eigenvalues()
        .ok_or_else(|| JacobiError::Resolution(format!("unitary eigenproblem failed at t={t}")))?;
    let phases: f64 = eig.iter().map(|z| z.arg()).sum();
    let x = (phases - 2.0 * lifted) / TAU;
    let n = x.round();
    if (x - n).abs() > 0.25 || n < -0.5 {
        return Err(JacobiError::Resolution(format!(
            "conjugate count {x:.3} is not a non-negative integer at t={t}"
        )));
    }
    Ok(n as usize)
}

fn frame_svd(j: &DMatrix<f64>, jp: &DMatrix<f64>) -> (DMatrix<f64>, SVD<f64, nalgebra::Dyn, nalgebra::Dyn>) {
    let n = j.ncols();
    let mut stacked = DMatrix::zeros(2 * n, n);
    stacked.rows_mut(0, n).copy_from(j);
    stacked.rows_mut(n, n).copy_from(jp);
    let r_inv = stacked.qr().r().try_inverse().expect("Jacobi frame has full rank");
    let svd = SVD::new(j * &r_inv, false, true);
    (r_inv, svd)
}

/// Kernel of `J` measured against the frame `[J; J′]`.
///
/// With `[J; J′] = QR`, the singular values of `J R⁻¹` are the cosines of
/// the Prüfer angles and lie in `[0, 1]`; those at most `tol` span the
/// kernel. Returned vectors are `R⁻¹w` normalized, with `w` the matching
/// right singular vectors.
fn frame_kernel(j: &DMatrix<f64>, jp: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (r_inv, svd) = frame_svd(j, jp);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(k, _)| {
            let v = &r_inv * v_t.row(k).transpose();
            let norm = v.norm();
            v / norm
        })
        .collect()
}

fn kernel_dimension(j: &DMatrix<f64>, jp: &DMatrix<f64>, tol: f64) -> usize {
    frame_kernel(j, jp, tol).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePoint {
    pub t: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateReport {
    /// Conjugate instants in `(0, 1)`, strictly increasing.
    pub points: Vec<ConjugatePoint>,
    /// `m(1) == 0`.
    pub nondegenerate: bool,
    pub total: usize,
}

/// Locate the conjugate instants of `sol` with their multiplicities.
///
/// Multiplicities are read off the singular values of `J(t)` relative to the
/// frame `[J; J′]` at `kernel_tol` and must agree with the jump of the count.
pub fn conjugate_points(sol: &JacobiSolution, kernel_tol: f64) -> Result<ConjugateReport, JacobiError> {
    if !(kernel_tol > 0.0) {
        return Err(JacobiError::InvalidParameter(format!(
            "kernel_tol must be positive, got {kernel_tol}"
        )));
    }
    let phase = sol.lifted_phase()?;
    let counts = sol.counting_function()?;
    let mut located = Vec::new();
    for i in 0..sol.steps() {
        let (a, b) = (counts[i], counts[i + 1]);
        if b < a {
            // crossings of π run one way only; a backwards step means the grid is too coarse
            return Err(JacobiError::Resolution(format!(
                "conjugate count decreases on [{}, {}]",
                sol.grid[i],
                sol.grid[i + 1]
            )));
        }
        if b > a {
            isolate(sol, &phase, (sol.grid[i], a), (sol.grid[i + 1], b), &mut located)?;
        }
    }

    let last = sol.steps();
    let mut nondegenerate = kernel_dimension(&sol.j[last], &sol.jp[last], kernel_tol) == 0;
    let mut points = Vec::new();
    for (t, jump) in located {
        if t > 1.0 - ENDPOINT_MARGIN {
            nondegenerate = false;
            continue;
        }
        let (j, jp) = sol.state_at(t);
        let found = kernel_dimension(&j, &jp, kernel_tol);
        if found != jump {
            return Err(JacobiError::UnresolvedCluster {
                t,
                expected: jump,
                found,
            });
        }
        points.push(ConjugatePoint { t, multiplicity: found });
    }
    let total = points.iter().map(|p| p.multiplicity).sum();
    Ok(ConjugateReport {
        points,
        nondegenerate,
        total,
    })
}

fn isolate(
    sol: &JacobiSolution,
    phase: &[f64],
    (a, na): (f64, usize),
    (b, nb): (f64, usize),
    out: &mut Vec<(f64, usize)>,
) -> Result<(), JacobiError> {
    if na == nb {
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    if b - a <= LOCALIZATION_WIDTH {
        out.push((mid, nb.saturating_sub(na)));
        return Ok(());
    }
    let nm = sol.count_at(mid, phase)?.clamp(na.min(nb), na.max(nb));
    isolate(sol, phase, (a, na), (mid, nm), out)?;
    isolate(sol, phase, (mid, nm), (b, nb), out)
}

/// Kernel vector `v` of `J(t₀)` with the endpoint derivative
/// `u′(1) = t₀·J′(t₀)v` of the rescaled field `u(x) = J(t₀x)v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelField {
    pub v: Vec<f64>,
    pub u_prime_end: Vec<f64>,
}

/// Basis of unit vectors for `ker J(t₀)`, at relative tolerance `kernel_tol`
/// against the frame `[J; J′]`.
pub fn kernel_fields(sol: &JacobiSolution, t0: f64, kernel_tol: f64) -> Result<Vec<KernelField>, JacobiError> {
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(JacobiError::InvalidParameter(format!("t0 must lie in (0, 1], got {t0}")));
    }
    let (j, jp) = sol.state_at(t0);
    let mut out = Vec::new();
    for v in frame_kernel(&j, &jp, kernel_tol) {
        let pivot = v.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m });
        let v = if pivot < 0.0 { -v } else { v };
        let u_prime_end = (&jp * &v * t0).iter().copied().collect();
        out.push(KernelField {
            v: v.iter().copied().collect(),
            u_prime_end,
        });
    }
    if out.is_empty() {
        return Err(JacobiError::NotAConjugateInstant { t: t0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const C: f64 = 2.5 * PI;

    #[test]
    fn zero_profile_gives_linear_fields() {
        let sol = solve_jacobi(&CurvatureProfile::zero(2), 500).unwrap();
        for (t, j) in sol.grid.iter().zip(&sol.j) {
            assert_abs_diff_eq!(j, &(DMatrix::identity(2, 2) * *t), epsilon = 1e-13);
        }
        let r = conjugate_points(&sol, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(r, ConjugateReport { points: vec![], nondegenerate: true, total: 0 });
        assert_eq!(
            kernel_fields(&sol, 0.5, DEFAULT_KERNEL_TOL),
            Err(JacobiError::NotAConjugateInstant { t: 0.5 })
        );
    }

    #[test]
    fn oscillator_matches_closed_form() {
        let sol = solve_jacobi(&CurvatureProfile::scalar(1, C * C), 2000).unwrap();
        let err = sol
            .grid
            .iter()
            .zip(&sol.j)
            .map(|(t, j)| (j[(0, 0)] - (C * t).sin() / C).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "{err}");
        let (j, jp) = sol.state_at(0.123456);
        assert!((j[(0, 0)] - (C * 0.123456).sin() / C).abs() < 1e-8);
        assert!((jp[(0, 0)] - (C * 0.123456).cos()).abs() < 1e-8);
    }

    #[test]
    fn negative_curvature_gives_sinh() {
        let sol = solve_jacobi(&CurvatureProfile::scalar(1, -1.0), 1000).unwrap();
        let mut prev = -1.0;
        for (t, j) in sol.grid.iter().zip(&sol.j) {
            assert!((j[(0, 0)] - t.sinh()).abs() < 1e-12);
            assert!(j[(0, 0)] > prev);
            prev = j[(0, 0)];
        }
    }

    #[test]
    fn oscillator_conjugate_points() {
        for (n, mult) in [(1, 1), (2, 2)] {
            let sol = solve_jacobi(&CurvatureProfile::scalar(n, C * C), 2000).unwrap();
            let r = conjugate_points(&sol, DEFAULT_KERNEL_TOL).unwrap();
            assert!(r.nondegenerate);
            assert_eq!(r.total, 2 * mult);
            assert_eq!(r.points.len(), 2);
            assert!((r.points[0].t - 0.4).abs() < 1e-9 && r.points[0].multiplicity == mult);
            assert!((r.points[1].t - 0.8).abs() < 1e-9 && r.points[1].multiplicity == mult);
        }
    }

    #[test]
    fn kernel_field_endpoint_derivative() {
        let sol = solve_jacobi(&CurvatureProfile::scalar(1, C * C), 2000).unwrap();
        let f = kernel_fields(&sol, 0.4, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(f.len(), 1);
        assert_abs_diff_eq!(f[0].v[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f[0].u_prime_end[0], -0.4, epsilon = 1e-8);
        let f = kernel_fields(&sol, 0.8, DEFAULT_KERNEL_TOL).unwrap();
        assert_abs_diff_eq!(f[0].u_prime_end[0], 0.8, epsilon = 1e-8);
    }

    #[test]
    fn block_profile_kernel_is_first_axis() {
        let sol = solve_jacobi(&CurvatureProfile::diagonal(&[C * C, 1.0]), 2000).unwrap();
        let f = kernel_fields(&sol, 0.4, DEFAULT_KERNEL_TOL).unwrap();
        assert_eq!(f.len(), 1);
        assert_abs_diff_eq!(f[0].v[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f[0].v[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_endpoint_is_flagged() {
        // conjugate instant exactly at t = 1
        let sol = solve_jacobi(&CurvatureProfile::scalar(1, 4.0 * PI * PI), 2000).unwrap();
        let r = conjugate_points(&sol, DEFAULT_KERNEL_TOL).unwrap();
        assert!(!r.nondegenerate);
        assert_eq!(r.total, 1);
        assert!((r.points[0].t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn wronskian_vanishes() {
        let p = CurvatureProfile::from_fn(2, |x| {
            DMatrix::from_row_slice(2, 2, &[30.0 * x.cos(), 5.0 * x, 5.0 * x, -20.0 + x * x])
        });
        let sol = solve_jacobi(&p, 2000).unwrap();
        assert!(sol.wronskian_defect() < 1e-8);
    }

    #[test]
    fn too_few_steps_rejected() {
        assert!(solve_jacobi(&CurvatureProfile::zero(1), 99).is_err());
    }

    #[test]
    fn counting_function_is_monotone_staircase() {
        let sol = solve_jacobi(&CurvatureProfile::diagonal(&[(3.5 * PI).powi(2), (1.5 * PI).powi(2)]), 2000).unwrap();
        let counts = sol.counting_function().unwrap();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        // zeros of sin(3.5πt): 2/7, 4/7, 6/7; of sin(1.5πt): 2/3
        assert_eq!(*counts.last().unwrap(), 4);
        let r = conjugate_points(&sol, DEFAULT_KERNEL_TOL).unwrap();
        let ts: Vec<f64> = r.points.iter().map(|p| p.t).collect();
        let expect = [2.0 / 7.0, 4.0 / 7.0, 2.0 / 3.0, 6.0 / 7.0];
        for (a, b) in ts.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{ts:?}");
        }
    }
}
