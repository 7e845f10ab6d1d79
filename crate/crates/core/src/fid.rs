//! Frechet distance between two embedding sets modelled as Gaussians.
//!
//! `FID = ‖μ_a − μ_b‖² + Tr(Σ_a + Σ_b − 2 (Σ_a Σ_b)^{1/2})`
//!
//! The product `Σ_a Σ_b` is not symmetric, so the trace of its square root is
//! taken from a symmetric matrix with the same nonzero spectrum. For any
//! factor `Σ_a = F Fᵀ`, `Σ_a Σ_b = F (Fᵀ Σ_b)` and `Fᵀ Σ_b F` share their
//! nonzero eigenvalues; `F = Σ_a^{1/2}` gives the textbook `S Σ_b S` form.
//! [`frechet_distance`] uses the rank-revealing pivoted Cholesky factor
//! instead, which drops the null space of `Σ_a` (rank deficiency is the
//! norm when there are fewer images than feature dimensions) and needs no
//! eigenvectors. [`matrix_sqrt_psd`] is the eigenvector route.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::{self, symmetric_eigen, LinalgError, Matrix};

/// Relative eigenvalue floor below which a PSD matrix is treated as rank deficient.
pub const EIGEN_CLAMP: f64 = 1e-8;
/// Allowed asymmetry, relative to `max(1, ‖m‖_F)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
/// Negative distances down to `−1e-6 · max(1, Tr Σ_a + Tr Σ_b)` are rounding noise.
pub const NEGATIVE_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FidError {
    #[error("need at least 2 samples to estimate a covariance, got {0}")]
    TooFewSamples(usize),
    #[error("embedding dimension must be positive")]
    DimensionZero,
    #[error("embedding data has {actual} values, expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("embedding row {row} column {col} is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is indefinite (eigenvalue {0:e})")]
    IndefiniteMatrix(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `count × dim` embeddings, stored row-major in single precision.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    count: usize,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingSet {
    pub fn new(count: usize, dim: usize, data: Vec<f32>) -> Result<Self, FidError> {
        if dim == 0 {
            return Err(FidError::DimensionZero);
        }
        if data.len() != count * dim {
            return Err(FidError::ShapeMismatch { expected: count * dim, actual: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(FidError::NonFinite { row: pos / dim, col: pos % dim });
        }
        Ok(Self { count, dim, data })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Mean vector and covariance matrix of an embedding set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mu: Vec<f64>,
    pub sigma: Matrix,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Column means and unbiased (`N − 1`) sample covariance, in `f64`.
pub fn gaussian_stats(e: &EmbeddingSet) -> Result<GaussianStats, FidError> {
    let (n, d) = (e.count, e.dim);
    if n < 2 {
        return Err(FidError::TooFewSamples(n));
    }
    let mut mu = vec![0.0f64; d];
    for r in 0..n {
        for (m, &x) in mu.iter_mut().zip(e.row(r)) {
            *m += x as f64;
        }
    }
    mu.iter_mut().for_each(|m| *m /= n as f64);

    let mut centered = vec![0.0f64; n * d];
    for r in 0..n {
        let out = &mut centered[r * d..(r + 1) * d];
        for ((o, &x), &m) in out.iter_mut().zip(e.row(r)).zip(&mu) {
            *o = x as f64 - m;
        }
    }
    let mut sigma = linalg::gram(&centered, n, d);
    sigma.scale(1.0 / (n - 1) as f64);
    sigma.symmetrize();
    Ok(GaussianStats { mu, sigma })
}

fn check_symmetric(m: &Matrix) -> Result<f64, FidError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() }.into());
    }
    let norm = m.frobenius_norm();
    let asym = m.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE * norm.max(1.0) {
        return Err(FidError::NotSymmetric(asym));
    }
    Ok(norm)
}

/// Principal square root of a symmetric positive semi-definite matrix.
///
/// Eigenvalues in `[−1e-8·‖m‖, 0)` are clamped to zero; anything more
/// negative is reported as [`FidError::IndefiniteMatrix`].
pub fn matrix_sqrt_psd(m: &Matrix) -> Result<Matrix, FidError> {
    let norm = check_symmetric(m)?;
    let mut sym = m.clone();
    sym.symmetrize();
    let eig = symmetric_eigen(&sym, true)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -EIGEN_CLAMP * norm {
            return Err(FidError::IndefiniteMatrix(lowest));
        }
    }
    Ok(eig.reconstruct(|l| libm::sqrt(l.max(0.0))))
}

/// `Tr((Σ_a Σ_b)^{1/2})` through the symmetric form described in the module docs.
pub fn trace_sqrt_product(sigma_a: &Matrix, sigma_b: &Matrix) -> Result<f64, FidError> {
    let norm_a = check_symmetric(sigma_a)?;
    let norm_b = check_symmetric(sigma_b)?;
    if sigma_a.rows() != sigma_b.rows() {
        return Err(FidError::DimensionMismatch(sigma_a.rows(), sigma_b.rows()));
    }
    if let Some(k) = (0..sigma_a.rows()).find(|&k| sigma_a[(k, k)] < -EIGEN_CLAMP * norm_a) {
        return Err(FidError::IndefiniteMatrix(sigma_a[(k, k)]));
    }
    let factor = linalg::pivoted_cholesky(sigma_a, EIGEN_CLAMP * norm_a)?;
    if factor.cols() == 0 {
        return Ok(0.0);
    }
    // C = Fᵀ Σ_b F shares its nonzero spectrum with Σ_a Σ_b = F Fᵀ Σ_b.
    let weighted = sigma_b.matmul(&factor)?;
    let mut inner = factor.transpose().matmul(&weighted)?;
    drop(weighted);
    inner.symmetrize();
    let spectrum = symmetric_eigen(&inner, false)?;
    let scale = (norm_a * norm_b).max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for &mu in &spectrum.values {
        if mu < -EIGEN_CLAMP * scale {
            return Err(FidError::IndefiniteMatrix(mu));
        }
        total += libm::sqrt(mu.max(0.0));
    }
    Ok(total)
}

/// Frechet distance between two Gaussians; symmetric and non-negative.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64, FidError> {
    if a.dim() != b.dim() || a.sigma.rows() != b.sigma.rows() {
        return Err(FidError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a == b {
        return Ok(0.0);
    }
    let mean_term: f64 = a.mu.iter().zip(&b.mu).map(|(x, y)| (x - y) * (x - y)).sum();
    let traces = a.sigma.trace() + b.sigma.trace();
    let cross = trace_sqrt_product(&a.sigma, &b.sigma)?;
    let value = mean_term + traces - 2.0 * cross;
    if value < 0.0 && value >= -NEGATIVE_CLAMP * traces.max(1.0) {
        return Ok(0.0);
    }
    Ok(value)
}

/// Convenience wrapper: moments of both sets, then [`frechet_distance`].
pub fn frechet_distance_between(a: &EmbeddingSet, b: &EmbeddingSet) -> Result<f64, FidError> {
    if a.dim != b.dim {
        return Err(FidError::DimensionMismatch(a.dim, b.dim));
    }
    frechet_distance(&gaussian_stats(a)?, &gaussian_stats(b)?)
}
