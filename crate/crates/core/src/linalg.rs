//! Dense row-major matrices and a symmetric eigensolver.
//!
//! The eigensolver reduces a symmetric matrix to tridiagonal form with
//! Householder reflections and then runs implicit-shift QL iterations on the
//! tridiagonal. Eigenvectors are kept as *rows* so that every Givens rotation
//! and every reflection touches contiguous memory.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}x{1} times {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("QL iteration did not converge for eigenvalue {0}")]
    NoConvergence(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds a matrix from row-major data.
    ///
    /// # Panics
    /// Panics when `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: rows.len(), cols: N, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// Largest absolute difference between `self[(i, j)]` and `self[(j, i)]`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows.min(self.cols) {
            for j in (i + 1)..self.rows.min(self.cols) {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Replaces the matrix with `(M + Mᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        gemm_acc(&self.data, &other.data, &mut out.data, self.rows, self.cols, other.cols);
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators so the compiler can keep independent SIMD lanes busy.
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = c * 4;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in chunks * 4..n {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

const GEMM_KC: usize = 256;
const GEMM_NC: usize = 512;

/// `c += a · b` for contiguous row-major `a` (m×k), `b` (k×n), `c` (m×n).
pub(crate) fn gemm_acc(a: &[f64], b: &[f64], c: &mut [f64], m: usize, k: usize, n: usize) {
    gemm_strided(
        MatRef { data: a, stride: k },
        MatRef { data: b, stride: n },
        MatMut { data: c, stride: n },
        m,
        k,
        n,
    );
}

#[derive(Clone, Copy)]
pub(crate) struct MatRef<'a> {
    pub data: &'a [f64],
    pub stride: usize,
}

pub(crate) struct MatMut<'a> {
    pub data: &'a mut [f64],
    pub stride: usize,
}

const MR: usize = 4;
const NR: usize = 4;
const GEMM_MC: usize = 64;

/// Strided `c += a · b`. Blocks of `a` and `b` are packed into contiguous
/// panels and a 4×4 register tile of `c` is accumulated per panel pair.
pub(crate) fn gemm_strided(a: MatRef<'_>, b: MatRef<'_>, c: MatMut<'_>, m: usize, k: usize, n: usize) {
    let (lda, ldb, ldc) = (a.stride, b.stride, c.stride);
    let (a, b, c) = (a.data, b.data, c.data);
    let mut bpack = vec![0.0f64; GEMM_KC * (GEMM_NC + NR)];
    let mut apack = vec![0.0f64; GEMM_KC * (GEMM_MC + MR)];
    for k0 in (0..k).step_by(GEMM_KC) {
        let kc = (k0 + GEMM_KC).min(k) - k0;
        for j0 in (0..n).step_by(GEMM_NC) {
            let nc = (j0 + GEMM_NC).min(n) - j0;
            let npanels = nc.div_ceil(NR);
            for jp in 0..npanels {
                let panel = &mut bpack[jp * kc * NR..(jp + 1) * kc * NR];
                let cols = (nc - jp * NR).min(NR);
                for kk in 0..kc {
                    let src = &b[(k0 + kk) * ldb + j0 + jp * NR..];
                    let dst = &mut panel[kk * NR..kk * NR + NR];
                    dst[..cols].copy_from_slice(&src[..cols]);
                    dst[cols..].iter_mut().for_each(|v| *v = 0.0);
                }
            }
            for i0 in (0..m).step_by(GEMM_MC) {
                let mc = (i0 + GEMM_MC).min(m) - i0;
                let mpanels = mc.div_ceil(MR);
                for ip in 0..mpanels {
                    let panel = &mut apack[ip * kc * MR..(ip + 1) * kc * MR];
                    let rows = (mc - ip * MR).min(MR);
                    for r in 0..MR {
                        if r < rows {
                            let src = &a[(i0 + ip * MR + r) * lda + k0..];
                            for kk in 0..kc {
                                panel[kk * MR + r] = src[kk];
                            }
                        } else {
                            for kk in 0..kc {
                                panel[kk * MR + r] = 0.0;
                            }
                        }
                    }
                }
                for ip in 0..mpanels {
                    let ap = &apack[ip * kc * MR..(ip + 1) * kc * MR];
                    let rows = (mc - ip * MR).min(MR);
                    for jp in 0..npanels {
                        let bp = &bpack[jp * kc * NR..(jp + 1) * kc * NR];
                        let cols = (nc - jp * NR).min(NR);
                        let acc = micro_kernel(ap, bp);
                        for r in 0..rows {
                            let row = &mut c[(i0 + ip * MR + r) * ldc + j0 + jp * NR..];
                            for (dst, &v) in row[..cols].iter_mut().zip(&acc[r][..cols]) {
                                *dst += v;
                            }
                        }
                    }
                }
            }
        }
    }
}

#[inline(always)]
fn micro_kernel(ap: &[f64], bp: &[f64]) -> [[f64; NR]; MR] {
    let mut acc = [[0.0f64; NR]; MR];
    for (av, bv) in ap.chunks_exact(MR).zip(bp.chunks_exact(NR)) {
        for i in 0..MR {
            for j in 0..NR {
                acc[i][j] += av[i] * bv[j];
            }
        }
    }
    acc
}

/// Gram matrix `xᵀ x` of a row-major `rows × cols` matrix. Only the blocks on
/// and above the diagonal are computed; the rest is mirrored.
pub fn gram(x: &[f64], rows: usize, cols: usize) -> Matrix {
    const BLOCK: usize = 256;
    let mut xt = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            xt[c * rows + r] = x[r * cols + c];
        }
    }
    let mut out = Matrix::zeros(cols, cols);
    for i0 in (0..cols).step_by(BLOCK) {
        let i1 = (i0 + BLOCK).min(cols);
        gemm_strided(
            MatRef { data: &xt[i0 * rows..], stride: rows },
            MatRef { data: &x[i0..], stride: cols },
            MatMut { data: &mut out.data[i0 * cols + i0..], stride: cols },
            i1 - i0,
            rows,
            cols - i0,
        );
    }
    for i in 0..cols {
        for j in 0..i {
            out.data[i * cols + j] = out.data[j * cols + i];
        }
    }
    out
}

/// Low-rank factor `F` (n×r, row-major) with `F Fᵀ ≈ m` from diagonally
/// pivoted Cholesky.
///
/// The factorisation stops once every remaining Schur-complement diagonal
/// entry is at most `tolerance`, which makes it rank revealing for positive
/// semi-definite input.
pub fn pivoted_cholesky(m: &Matrix, tolerance: f64) -> Result<Matrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut residual: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    // Row i holds F[i, 0..rank] contiguously; width n so columns can be appended in place.
    let mut factor = vec![0.0f64; n * n];
    let mut rank = 0;
    while rank < n {
        let (pivot, &best) = residual
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("non-empty");
        if best <= tolerance {
            break;
        }
        let root = libm::sqrt(best);
        let pivot_row = factor[pivot * n..pivot * n + rank].to_vec();
        for i in 0..n {
            let row = &mut factor[i * n..i * n + n];
            // Rows already pivoted (or numerically exhausted) have a zero Schur row.
            let value = if residual[i] <= 0.0 && i != pivot {
                0.0
            } else {
                (m[(i, pivot)] - dot(&row[..rank], &pivot_row)) / root
            };
            row[rank] = value;
            residual[i] -= value * value;
        }
        residual[pivot] = 0.0;
        rank += 1;
    }
    let mut out = Matrix::zeros(n, rank);
    for i in 0..n {
        out.row_mut(i).copy_from_slice(&factor[i * n..i * n + rank]);
    }
    Ok(out)
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Row `k` is the unit eigenvector belonging to `values[k]`.
    pub vectors: Option<Matrix>,
}

impl SymmetricEigen {
    /// Rebuilds `V · diag(f(λ)) · Vᵀ`.
    ///
    /// # Panics
    /// Panics when the decomposition was computed without eigenvectors.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let v = self.vectors.as_ref().expect("eigenvectors were not computed");
        let n = self.values.len();
        // Vᵀ has eigenvectors as columns; scale row k of V by f(λ_k) and form Vᵀ·(F V).
        let mut scaled = v.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            scaled.row_mut(k).iter_mut().for_each(|x| *x *= fk);
        }
        let vt = v.transpose();
        let mut out = Matrix::zeros(n, n);
        gemm_acc(vt.as_slice(), scaled.as_slice(), out.as_mut_slice(), n, n, n);
        out.symmetrize();
        out
    }
}

/// Computes eigenvalues (and optionally eigenvectors) of a symmetric matrix.
///
/// Only symmetry up to rounding is assumed; the strictly lower triangle is
/// read as given, so callers should symmetrize noisy input first.
pub fn symmetric_eigen(m: &Matrix, with_vectors: bool) -> Result<SymmetricEigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(SymmetricEigen { values: Vec::new(), vectors: with_vectors.then(|| Matrix::zeros(0, 0)) });
    }
    let anorm = m.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut work = m.data.clone();
    let tri = tridiagonalize(&mut work, n);
    drop(work);

    let mut d = tri.diag;
    let mut e = tri.off;
    e.push(0.0);
    let mut z = with_vectors.then(|| Matrix::identity(n));
    implicit_ql(&mut d, &mut e, z.as_mut(), anorm)?;

    if let Some(z) = z.as_mut() {
        apply_reflections(&tri.reflectors, z);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = z.map(|z| {
        let mut sorted = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            sorted.row_mut(dst).copy_from_slice(z.row(src));
        }
        sorted
    });
    Ok(SymmetricEigen { values, vectors })
}

struct Reflector {
    /// First coordinate the reflector acts on.
    start: usize,
    beta: f64,
    v: Vec<f64>,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    reflectors: Vec<Reflector>,
}

/// Householder reduction `A = Q T Qᵀ`, destroying `a`.
fn tridiagonalize(a: &mut [f64], n: usize) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        diag[k] = a[k * n + k];
        let start = k + 1;
        let m = n - start;
        // Column k below the diagonal equals row k right of it.
        let x = &a[k * n + start..k * n + n];
        let xnorm = libm::sqrt(dot(x, x));
        if xnorm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        off[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // p = β B v over the trailing block B.
        for i in 0..m {
            let row = &a[(start + i) * n + start..(start + i) * n + n];
            p[i] = beta * dot(row, &v);
        }
        let kappa = 0.5 * beta * dot(&p[..m], &v);
        for i in 0..m {
            p[i] -= kappa * v[i];
        }
        // B -= v wᵀ + w vᵀ with w = p.
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(start + i) * n + start..(start + i) * n + n];
            for j in 0..m {
                row[j] -= vi * p[j] + wi * v[j];
            }
        }
        reflectors.push(Reflector { start, beta, v });
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    diag[n - 1] = a[(n - 1) * n + n - 1];
    Tridiagonal { diag, off, reflectors }
}

/// Implicit-shift QL on a tridiagonal (`d` diagonal, `e[i]` couples `i` and
/// `i + 1`, `e[n-1] = 0`). Rotations are accumulated into the rows of `z`.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Matrix>, anorm: f64) -> Result<(), LinalgError> {
    let n = d.len();
    let floor = f64::EPSILON * anorm;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(LinalgError::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    rotate_rows(z, i, s, c);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[inline]
fn rotate_rows(z: &mut Matrix, i: usize, s: f64, c: f64) {
    let cols = z.cols;
    let (upper, lower) = z.data.split_at_mut((i + 1) * cols);
    let zi = &mut upper[i * cols..];
    let zn = &mut lower[..cols];
    for (a, b) in zi.iter_mut().zip(zn.iter_mut()) {
        let f = *b;
        *b = s * *a + c * f;
        *a = c * *a - s * f;
    }
}

/// Maps eigenvectors of `T` (rows of `z`) to eigenvectors of `A = Q T Qᵀ`.
fn apply_reflections(reflectors: &[Reflector], z: &mut Matrix) {
    const BLOCK: usize = 32;
    let cols = z.cols;
    let rows = z.rows;
    for r0 in (0..rows).step_by(BLOCK) {
        let r1 = (r0 + BLOCK).min(rows);
        for h in reflectors.iter().rev() {
            for r in r0..r1 {
                let x = &mut z.data[r * cols + h.start..(r + 1) * cols];
                let t = h.beta * dot(&h.v, x);
                if t != 0.0 {
                    axpy(-t, &h.v, x);
                }
            }
        }
    }
}
