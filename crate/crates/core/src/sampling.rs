//! Random constructions shared by the property suites, the benches and the
//! CLI's randomized verification run.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use crate::geometry::CurvatureProfile;
use crate::spectral::{MatrixPath, SymMatrix};

/// Haar-like random orthogonal matrix from the QR factorization of a matrix
/// with uniform entries, with column signs fixed by `diag(R) > 0`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let qr = a.qr();
        let r = qr.r();
        if (0..n).any(|i| r[(i, i)].abs() < 1e-8) {
            continue;
        }
        let mut q = qr.q();
        for (j, mut col) in q.column_iter_mut().enumerate() {
            if r[(j, j)] < 0.0 {
                col.neg_mut();
            }
        }
        return q;
    }
}

/// Random symmetric matrix with uniform entries in `[-1, 1]` and every
/// eigenvalue at least `gap` away from zero.
pub fn random_symmetric_nondegenerate<R: Rng + ?Sized>(
    n: usize,
    gap: f64,
    rng: &mut R,
) -> SymMatrix {
    loop {
        let m = SymMatrix::new(DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)));
        if m.eigenvalues().iter().all(|e| e.abs() >= gap) {
            return m;
        }
    }
}

/// `λ ↦ diag(aᵢ(λ − rᵢ)) + Qᵀ diag(εᵢ) Q`: an affine diagonal path with planted
/// roots, perturbed by a small random symmetric term.
#[derive(Debug, Clone)]
pub struct PlantedPath {
    pub slopes: Vec<f64>,
    pub roots: Vec<f64>,
    pub perturbation: DMatrix<f64>,
}

impl PlantedPath {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut roots: Vec<f64> = Vec::with_capacity(n);
        while roots.len() < n {
            let r = if rng.random_bool(0.25) {
                if rng.random_bool(0.5) {
                    rng.random_range(-1.0..-0.2)
                } else {
                    rng.random_range(1.2..2.0)
                }
            } else {
                rng.random_range(0.05..0.95)
            };
            if roots.iter().all(|&q| (q - r).abs() >= 0.02) {
                roots.push(r);
            }
        }
        let slopes = (0..n)
            .map(|_| {
                let s = rng.random_range(0.5..2.0);
                if rng.random_bool(0.5) {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let eps: Vec<f64> = (0..n).map(|_| rng.random_range(-0.01..0.01)).collect();
        let q = random_orthogonal(n, rng);
        let perturbation = q.transpose() * DMatrix::from_diagonal(&eps.into()) * &q;
        PlantedPath {
            slopes,
            roots,
            perturbation,
        }
    }
}

impl MatrixPath for PlantedPath {
    fn dim(&self) -> usize {
        self.slopes.len()
    }

    fn eval(&self, lambda: f64) -> SymMatrix {
        let mut m = self.perturbation.clone();
        for i in 0..self.dim() {
            m[(i, i)] += self.slopes[i] * (lambda - self.roots[i]);
        }
        SymMatrix::new(m)
    }
}

/// Parameters of `S(x) = Qᵀ diag(aᵢ + bᵢ sin(πx + φᵢ)) Q`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothProfileParams {
    pub offsets: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    pub rotation: Vec<Vec<f64>>,
}

/// Largest magnitude allowed for the offsets and amplitudes.
pub const PROFILE_BOUND: f64 = 9.0 * PI * PI;

impl SmoothProfileParams {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut draw = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|_| rng.random_range(lo..hi)).collect() };
        let offsets = draw(-PROFILE_BOUND, PROFILE_BOUND);
        let amplitudes = draw(-PROFILE_BOUND, PROFILE_BOUND);
        let phases = draw(0.0, 2.0 * PI);
        let q = random_orthogonal(n, rng);
        SmoothProfileParams {
            offsets,
            amplitudes,
            phases,
            rotation: q.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }

    pub fn profile(&self) -> CurvatureProfile {
        let n = self.offsets.len();
        let q = DMatrix::from_fn(n, n, |i, j| self.rotation[i][j]);
        let qt = q.transpose();
        let this = self.clone();
        CurvatureProfile::from_fn(n, move |x| {
            let d: Vec<f64> = (0..n)
                .map(|i| this.offsets[i] + this.amplitudes[i] * (PI * x + this.phases[i]).sin())
                .collect();
            &qt * DMatrix::from_diagonal(&d.into()) * &q
        })
    }
}
