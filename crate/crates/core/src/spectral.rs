//! Finite-dimensional symmetric spectral utilities: Morse index, signature,
//! and crossings of paths of symmetric matrices.
//!
//! A path `λ ↦ L(λ)` on `[0, 1]` crosses at `λ₀` when `L(λ₀)` has a kernel.
//! The crossing is regular when the derivative form `⟨L'(λ₀)u, u⟩`
//! restricted to that kernel is non-degenerate, and then the difference of
//! the endpoint Morse indices equals the sum of the signatures of these
//! restricted forms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("degenerate form: eigenvalue {eigenvalue:e} lies within {tol:e} of zero")]
    Degenerate { eigenvalue: f64, tol: f64 },
    #[error("path endpoint λ={lambda} is degenerate (eigenvalue {eigenvalue:e})")]
    EndpointDegenerate { lambda: f64, eigenvalue: f64 },
    #[error("irregular crossing at λ={lambda}: restricted form eigenvalue {value:e}")]
    IrregularCrossing { lambda: f64, value: f64 },
    #[error(
        "unresolved crossing cluster near λ={lambda}: inertia jumps by {expected} \
         but only {found} kernel vector(s) found; raise the grid size"
    )]
    UnresolvedCluster { lambda: f64, expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Real symmetric matrix. Symmetric by construction: the input is replaced by
/// `(A + Aᵀ)/2`, which makes `a[i][j] == a[j][i]` bit-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Panics if `m` is not square.
    pub fn new(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetric matrix must be square");
        let n = m.nrows();
        let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        SymMatrix(sym)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenpairs sorted by ascending eigenvalue; eigenvectors are the columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let SymmetricEigen {
            eigenvalues,
            eigenvectors,
        } = SymmetricEigen::new(self.0.clone());
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let values = order.iter().map(|&k| eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), order.len(), |i, k| eigenvectors[(i, order[k])]);
        (values, vectors)
    }

    /// `Qᵀ A Q`.
    pub fn congruence(&self, q: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::new(q.transpose() * &self.0 * q)
    }
}

/// Counts of negative, near-zero and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

pub fn inertia(m: &SymMatrix, zero_tol: f64) -> Inertia {
    inertia_of(&m.eigenvalues(), zero_tol)
}

fn inertia_of(eigenvalues: &[f64], zero_tol: f64) -> Inertia {
    let mut out = Inertia {
        negative: 0,
        zero: 0,
        positive: 0,
    };
    for &e in eigenvalues {
        if e < -zero_tol {
            out.negative += 1;
        } else if e > zero_tol {
            out.positive += 1;
        } else {
            out.zero += 1;
        }
    }
    out
}

fn nearest_zero(eigenvalues: &[f64], zero_tol: f64) -> Option<f64> {
    eigenvalues
        .iter()
        .copied()
        .filter(|e| e.abs() <= zero_tol)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
}

/// Number of eigenvalues below `-zero_tol`. Fails with `Degenerate` if any
/// eigenvalue lies in `[-zero_tol, zero_tol]`.
pub fn morse_index(m: &SymMatrix, zero_tol: f64) -> Result<usize, SpectralError> {
    let ev = m.eigenvalues();
    if let Some(eigenvalue) = nearest_zero(&ev, zero_tol) {
        return Err(SpectralError::Degenerate {
            eigenvalue,
            tol: zero_tol,
        });
    }
    Ok(inertia_of(&ev, zero_tol).negative)
}

/// `#positive − #negative` eigenvalues of a non-degenerate form.
pub fn signature(m: &SymMatrix, zero_tol: f64) -> Result<i64, SpectralError> {
    let ev = m.eigenvalues();
    if let Some(eigenvalue) = nearest_zero(&ev, zero_tol) {
        return Err(SpectralError::Degenerate {
            eigenvalue,
            tol: zero_tol,
        });
    }
    let i = inertia_of(&ev, zero_tol);
    Ok(i.positive as i64 - i.negative as i64)
}

/// A path `λ ↦ L(λ)` of symmetric matrices over `[0, 1]`.
pub trait MatrixPath: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, lambda: f64) -> SymMatrix;
}

/// Closure-backed [`MatrixPath`].
pub struct FnPath<F> {
    dim: usize,
    f: F,
}

impl<F> FnPath<F>
where
    F: Fn(f64) -> SymMatrix + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnPath { dim, f }
    }
}

impl<F> MatrixPath for FnPath<F>
where
    F: Fn(f64) -> SymMatrix + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, lambda: f64) -> SymMatrix {
        (self.f)(lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingParams {
    /// Number of uniform cells in the initial scan of `[0, 1]`.
    pub grid_size: usize,
    /// Eigenvalues with magnitude at most this are treated as kernel.
    pub kernel_tol: f64,
    /// Restricted-form eigenvalues must exceed this in magnitude.
    pub regularity_tol: f64,
    /// Central-difference step for `L'(λ₀)`.
    pub fd_step: f64,
    /// Localization width of each crossing.
    pub bisection_width: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for CrossingParams {
    fn default() -> Self {
        CrossingParams {
            grid_size: 512,
            kernel_tol: 1e-8,
            regularity_tol: 1e-6,
            fd_step: 1e-5,
            bisection_width: 1e-10,
            execution: Execution::default(),
        }
    }
}

impl CrossingParams {
    fn validate(&self) -> Result<(), SpectralError> {
        if self.grid_size < 2 {
            return Err(SpectralError::InvalidParameter(format!(
                "grid_size must be at least 2, got {}",
                self.grid_size
            )));
        }
        for (name, v) in [
            ("kernel_tol", self.kernel_tol),
            ("regularity_tol", self.regularity_tol),
            ("fd_step", self.fd_step),
            ("bisection_width", self.bisection_width),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SpectralError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub lambda0: f64,
    /// Orthonormal basis of the numerical kernel of `L(λ₀)`.
    pub kernel_basis: Vec<Vec<f64>>,
    /// Eigenvalues of `L'(λ₀)` restricted to the kernel.
    pub form_eigenvalues: Vec<f64>,
    pub signature: i64,
}

impl Crossing {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    negative: usize,
    sigma: f64,
}

fn sample(path: &dyn MatrixPath, lambda: f64) -> Sample {
    let ev = path.eval(lambda).eigenvalues();
    Sample {
        negative: ev.iter().filter(|&&e| e < 0.0).count(),
        sigma: ev.iter().fold(f64::INFINITY, |m, e| m.min(e.abs())),
    }
}

fn min_abs_eigenvalue(path: &dyn MatrixPath, lambda: f64) -> f64 {
    sample(path, lambda).sigma
}

/// Locate all crossings of `path` in `(0, 1)`.
///
/// The scan counts negative eigenvalues on a uniform grid. Cells where the
/// count jumps are bisected on the count until each jump is isolated to
/// `bisection_width`; this catches kernels of any dimension whose
/// eigenvalues cross with a common sign. Interior local minima of the
/// smallest eigenvalue magnitude are refined by golden-section search to
/// catch crossings with cancelling inertia. At each located instant the
/// kernel is read off the eigen-decomposition and the derivative form is
/// estimated by central differences.
pub fn find_crossings(
    path: &dyn MatrixPath,
    params: &CrossingParams,
) -> Result<Vec<Crossing>, SpectralError> {
    params.validate()?;
    for lambda in [0.0, 1.0] {
        let ev = path.eval(lambda).eigenvalues();
        if let Some(eigenvalue) = nearest_zero(&ev, params.kernel_tol) {
            return Err(SpectralError::EndpointDegenerate { lambda, eigenvalue });
        }
    }

    let grid = params.grid_size;
    let at = |i: usize| i as f64 / grid as f64;
    let samples = params
        .execution
        .map_indexed(grid + 1, |i| sample(path, at(i)));

    // (location, inertia drop across it)
    let mut candidates: Vec<(f64, i64)> = Vec::new();
    let jump_cells: Vec<usize> = (0..grid)
        .filter(|&i| samples[i].negative != samples[i + 1].negative)
        .collect();
    let isolated = params.execution.map_indexed(jump_cells.len(), |k| {
        let i = jump_cells[k];
        let mut out = Vec::new();
        isolate(
            path,
            (at(i), samples[i].negative),
            (at(i + 1), samples[i + 1].negative),
            params.bisection_width,
            &mut out,
        );
        out
    });
    candidates.extend(isolated.into_iter().flatten());

    let minima: Vec<usize> = (1..grid)
        .filter(|&i| {
            let (l, c, r) = (samples[i - 1].sigma, samples[i].sigma, samples[i + 1].sigma);
            let touches_jump = jump_cells.contains(&(i - 1)) || jump_cells.contains(&i);
            let spread = (l - c).abs().max((r - c).abs());
            c <= l && c <= r && c <= 1.5 * spread && !touches_jump
        })
        .collect();
    let refined = params.execution.map_indexed(minima.len(), |k| {
        let i = minima[k];
        let lambda = golden_section_min(
            |x| min_abs_eigenvalue(path, x),
            at(i - 1),
            at(i + 1),
            params.bisection_width,
        );
        (lambda, min_abs_eigenvalue(path, lambda))
    });
    candidates.extend(
        refined
            .into_iter()
            .filter(|&(_, sigma)| sigma <= params.kernel_tol)
            .map(|(lambda, _)| (lambda, 0)),
    );
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let analysed = params.execution.try_map_indexed(candidates.len(), |k| {
        let (lambda, drop) = candidates[k];
        analyse_crossing(path, lambda, drop.unsigned_abs() as usize, params)
    })?;
    Ok(analysed.into_iter().flatten().collect())
}

fn isolate(
    path: &dyn MatrixPath,
    (a, na): (f64, usize),
    (b, nb): (f64, usize),
    width: f64,
    out: &mut Vec<(f64, i64)>,
) {
    if na == nb {
        return;
    }
    let mid = 0.5 * (a + b);
    if b - a <= width {
        out.push((mid, na as i64 - nb as i64));
        return;
    }
    let nm = sample(path, mid).negative;
    isolate(path, (a, na), (mid, nm), width, out);
    isolate(path, (mid, nm), (b, nb), width, out);
}

pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn analyse_crossing(
    path: &dyn MatrixPath,
    lambda0: f64,
    expected_dim: usize,
    params: &CrossingParams,
) -> Result<Option<Crossing>, SpectralError> {
    let (values, vectors) = path.eval(lambda0).eigen();
    let kernel: Vec<usize> = (0..values.len())
        .filter(|&k| values[k].abs() <= params.kernel_tol)
        .collect();
    if kernel.len() < expected_dim {
        return Err(SpectralError::UnresolvedCluster {
            lambda: lambda0,
            expected: expected_dim,
            found: kernel.len(),
        });
    }
    if kernel.is_empty() {
        return Ok(None);
    }
    let basis = vectors.select_columns(&kernel);

    let h = params.fd_step.min(0.5 * lambda0.min(1.0 - lambda0));
    let forward = path.eval(lambda0 + h).into_matrix();
    let backward = path.eval(lambda0 - h).into_matrix();
    let derivative = SymMatrix::new((forward - backward) / (2.0 * h));
    let restricted = derivative.congruence(&basis);
    let form_eigenvalues = restricted.eigenvalues();
    if let Some(&value) = form_eigenvalues
        .iter()
        .find(|v| v.abs() <= params.regularity_tol)
    {
        return Err(SpectralError::IrregularCrossing {
            lambda: lambda0,
            value,
        });
    }
    let positive = form_eigenvalues.iter().filter(|&&v| v > 0.0).count() as i64;
    let negative = form_eigenvalues.len() as i64 - positive;
    Ok(Some(Crossing {
        lambda0,
        kernel_basis: basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect(),
        form_eigenvalues,
        signature: positive - negative,
    }))
}

/// Both sides of the endpoint identity `μ(L(0)) − μ(L(1)) = Σ sgn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingIdentity {
    pub index_difference: i64,
    pub signature_sum: i64,
    pub holds: bool,
    pub crossings: Vec<Crossing>,
}

pub fn crossing_sum_identity(
    path: &dyn MatrixPath,
    params: &CrossingParams,
) -> Result<CrossingIdentity, SpectralError> {
    let crossings = find_crossings(path, params)?;
    let mu0 = morse_index(&path.eval(0.0), params.kernel_tol)? as i64;
    let mu1 = morse_index(&path.eval(1.0), params.kernel_tol)? as i64;
    let index_difference = mu0 - mu1;
    let signature_sum = crossings.iter().map(|c| c.signature).sum();
    Ok(CrossingIdentity {
        index_difference,
        signature_sum,
        holds: index_difference == signature_sum,
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    #[test]
    fn morse_index_of_diagonals() {
        assert_eq!(morse_index(&SymMatrix::from_diagonal(&[-0.5, 1.0]), TOL), Ok(1));
        assert_eq!(morse_index(&SymMatrix::identity(3), TOL), Ok(0));
        assert_eq!(
            morse_index(&SymMatrix::from_diagonal(&[-2.0, -1.0, 0.5, 3.0]), TOL),
            Ok(2)
        );
    }

    #[test]
    fn degenerate_forms_are_reported() {
        let m = SymMatrix::from_diagonal(&[1.0, 1e-12, -1.0]);
        assert!(matches!(
            morse_index(&m, TOL),
            Err(SpectralError::Degenerate { .. })
        ));
        assert!(matches!(signature(&m, TOL), Err(SpectralError::Degenerate { .. })));
    }

    #[test]
    fn signature_of_diagonals() {
        assert_eq!(signature(&SymMatrix::from_diagonal(&[1.0, 1.0]), TOL), Ok(2));
        assert_eq!(signature(&SymMatrix::from_diagonal(&[-3.0]), TOL), Ok(-1));
        assert_eq!(signature(&SymMatrix::from_diagonal(&[2.0, -1.0, -1.0]), TOL), Ok(-1));
    }

    #[test]
    fn construction_symmetrizes_exactly() {
        let m = DMatrix::from_fn(5, 5, |i, j| (i as f64 + 0.1).powi(2) / (j as f64 + 0.3));
        let s = SymMatrix::new(m);
        let a = s.as_matrix();
        assert_eq!(a, &a.transpose());
    }

    #[test]
    fn single_affine_crossing() {
        let path = FnPath::new(2, |l| SymMatrix::from_diagonal(&[l - 0.5, 1.0]));
        let params = CrossingParams {
            grid_size: 100,
            ..Default::default()
        };
        let crossings = find_crossings(&path, &params).unwrap();
        assert_eq!(crossings.len(), 1);
        let c = &crossings[0];
        assert!((c.lambda0 - 0.5).abs() <= 1e-9);
        assert_eq!(c.kernel_dim(), 1);
        assert_eq!(c.signature, 1);
        assert!((c.form_eigenvalues[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_negative_crossings() {
        let path = FnPath::new(2, |l| SymMatrix::from_diagonal(&[0.5 - l, 0.8 - l]));
        let crossings = find_crossings(&path, &CrossingParams::default()).unwrap();
        let at: Vec<f64> = crossings.iter().map(|c| c.lambda0).collect();
        assert_eq!(at.len(), 2);
        assert!((at[0] - 0.5).abs() < 1e-9 && (at[1] - 0.8).abs() < 1e-9);
        assert!(crossings.iter().all(|c| c.signature == -1));
    }

    #[test]
    fn constant_path_has_no_crossings() {
        let path = FnPath::new(2, |_| SymMatrix::identity(2));
        assert!(find_crossings(&path, &CrossingParams::default()).unwrap().is_empty());
    }

    #[test]
    fn double_kernel_with_common_sign() {
        let path = FnPath::new(3, |l| SymMatrix::from_diagonal(&[0.3 - l, 0.3 - l, 2.0]));
        let crossings = find_crossings(&path, &CrossingParams::default()).unwrap();
        assert_eq!(crossings.len(), 1);
        assert_eq!(crossings[0].kernel_dim(), 2);
        assert_eq!(crossings[0].signature, -2);
    }

    #[test]
    fn cancelling_kernel_found_by_minimum_search() {
        // inertia does not change across 0.37: one eigenvalue goes down, one up
        let path = FnPath::new(2, |l| SymMatrix::from_diagonal(&[0.37 - l, l - 0.37]));
        let params = CrossingParams {
            grid_size: 64,
            ..Default::default()
        };
        let crossings = find_crossings(&path, &params).unwrap();
        assert_eq!(crossings.len(), 1);
        assert_eq!(crossings[0].kernel_dim(), 2);
        assert_eq!(crossings[0].signature, 0);
    }

    #[test]
    fn identity_examples() {
        let params = CrossingParams::default();
        let a = FnPath::new(2, |l| SymMatrix::from_diagonal(&[l - 0.5, 1.0]));
        let r = crossing_sum_identity(&a, &params).unwrap();
        assert_eq!((r.index_difference, r.signature_sum, r.holds), (1, 1, true));
        let b = FnPath::new(2, |l| SymMatrix::from_diagonal(&[0.5 - l, 0.8 - l]));
        let r = crossing_sum_identity(&b, &params).unwrap();
        assert_eq!((r.index_difference, r.signature_sum, r.holds), (-2, -2, true));
    }

    #[test]
    fn degenerate_endpoint_rejected() {
        let path = FnPath::new(1, |l| SymMatrix::from_diagonal(&[l]));
        assert!(matches!(
            find_crossings(&path, &CrossingParams::default()),
            Err(SpectralError::EndpointDegenerate { lambda, .. }) if lambda == 0.0
        ));
    }

    #[test]
    fn tangential_touch_is_irregular() {
        let path = FnPath::new(1, |l| SymMatrix::from_diagonal(&[(l - 0.4) * (l - 0.4)]));
        let params = CrossingParams {
            grid_size: 50,
            kernel_tol: 1e-8,
            ..Default::default()
        };
        assert!(matches!(
            find_crossings(&path, &params),
            Err(SpectralError::IrregularCrossing { .. })
        ));
    }

    #[test]
    fn nearby_crossings_are_separated() {
        let path = FnPath::new(2, |l| {
            SymMatrix::from_diagonal(&[50.0 * (0.5 - l), 50.0 * (0.5 + 1e-9 - l)])
        });
        let c = find_crossings(&path, &CrossingParams::default()).unwrap();
        assert_eq!(c.len(), 2);
        assert!((c[0].lambda0 - 0.5).abs() < 1e-10);
        assert!((c[1].lambda0 - 0.5 - 1e-9).abs() < 1e-10);
    }

    #[test]
    fn unseparable_crossings_are_a_cluster() {
        // two steep crossings inside one localization cell
        let path = FnPath::new(2, |l| {
            SymMatrix::from_diagonal(&[1e4 * (0.5 - l), 1e4 * (0.5 + 3e-11 - l)])
        });
        let params = CrossingParams {
            kernel_tol: 1e-9,
            ..Default::default()
        };
        let r = find_crossings(&path, &params);
        assert!(
            matches!(r, Err(SpectralError::UnresolvedCluster { .. })),
            "{r:?}"
        );
    }

    #[test]
    fn sequential_and_parallel_scans_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let path = sampling::PlantedPath::random(5, &mut rng);
        let seq = CrossingParams {
            execution: Execution::Sequential,
            ..Default::default()
        };
        let par = CrossingParams {
            execution: Execution::Parallel,
            ..Default::default()
        };
        assert_eq!(
            find_crossings(&path, &seq).unwrap(),
            find_crossings(&path, &par).unwrap()
        );
    }

    #[test]
    fn planted_paths_satisfy_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let path = sampling::PlantedPath::random(4, &mut rng);
            let r = crossing_sum_identity(&path, &CrossingParams::default()).unwrap();
            assert!(r.holds, "{r:?}");
            for c in &r.crossings {
                for (i, u) in c.kernel_basis.iter().enumerate() {
                    for (j, v) in c.kernel_basis.iter().enumerate() {
                        let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((dot - expect).abs() < 1e-10);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn conjugation_preserves_index(seed in any::<u64>(), n in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sampling::random_symmetric_nondegenerate(n, 0.05, &mut rng);
            let u = sampling::random_orthogonal(n, &mut rng);
            prop_assert_eq!(morse_index(&m.congruence(&u), TOL), morse_index(&m, TOL));
        }

        #[test]
        fn signature_counts_index(seed in any::<u64>(), n in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sampling::random_symmetric_nondegenerate(n, 0.05, &mut rng);
            let mu = morse_index(&m, TOL).unwrap() as i64;
            prop_assert_eq!(signature(&m, TOL).unwrap(), n as i64 - 2 * mu);
        }
    }
}
