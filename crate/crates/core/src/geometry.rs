//! Projective estimation: normalised DLT homography fitting and RANSAC.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::{symmetric_eigen, Matrix};
use crate::rng::SplitMix64;

/// Smallest determinant magnitude accepted for an invertible homography.
pub const MIN_DETERMINANT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("need at least 4 point pairs, got {0}")]
    TooFewPairs(usize),
    #[error("degenerate point configuration (collinear or coincident points)")]
    DegenerateConfiguration,
    #[error("no consensus: best hypothesis has {0} inliers (need 4)")]
    NoConsensus(usize),
    #[error("point maps to infinity")]
    PointAtInfinity,
    #[error("homography is singular")]
    SingularHomography,
    #[error("point coordinates must be finite")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A correspondence `src` (image A) ↔ `dst` (image B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPair {
    pub src: Point,
    pub dst: Point,
}

impl PointPair {
    pub const fn new(src: Point, dst: Point) -> Self {
        Self { src, dst }
    }
}

/// 3×3 projective transform acting on column vectors `(x, y, 1)ᵀ`.
///
/// Constructors normalise the matrix so that element (3,3) is 1; when that
/// element vanishes the matrix is scaled to unit Frobenius norm instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: [[f64; 3]; 3],
}

impl Homography {
    pub const fn identity() -> Self {
        Self { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub const fn translation(tx: f64, ty: f64) -> Self {
        Self { m: [[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]] }
    }

    pub const fn scaling(sx: f64, sy: f64) -> Self {
        Self { m: [[sx, 0.0, 0.0], [0.0, sy, 0.0], [0.0, 0.0, 1.0]] }
    }

    /// Normalises `m` and checks that it is invertible.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let h = Self { m: normalize(m) };
        if h.determinant().abs() <= MIN_DETERMINANT {
            return Err(GeometryError::SingularHomography);
        }
        Ok(h)
    }

    /// Wraps `m` as is: no normalisation and no invertibility check.
    pub const fn from_matrix_unchecked(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        let det = self.determinant();
        if !(det.abs() > MIN_DETERMINANT) {
            return Err(GeometryError::SingularHomography);
        }
        let m = &self.m;
        let adj = [
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ];
        let mut inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                inv[i][j] = adj[i][j] / det;
            }
        }
        Ok(Self { m: normalize(inv) })
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Homography) -> Homography {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Homography { m: normalize(out) }
    }

    pub fn project(&self, p: Point) -> Result<Point, GeometryError> {
        project_point(self, p)
    }
}

fn normalize(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let largest = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = if m[2][2].abs() > 1e-12 * largest {
        m[2][2]
    } else {
        libm::sqrt(m.iter().flatten().map(|v| v * v).sum::<f64>())
    };
    if scale == 0.0 {
        return m;
    }
    let mut out = m;
    out.iter_mut().flatten().for_each(|v| *v /= scale);
    out
}

/// `((h₁·p)/(h₃·p), (h₂·p)/(h₃·p))` in homogeneous arithmetic.
pub fn project_point(h: &Homography, p: Point) -> Result<Point, GeometryError> {
    let m = &h.m;
    let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
    let scale = m[2][0].abs() * p.x.abs() + m[2][1].abs() * p.y.abs() + m[2][2].abs();
    if w == 0.0 || w.abs() <= 1e-14 * scale || !w.is_finite() {
        return Err(GeometryError::PointAtInfinity);
    }
    Ok(Point::new(
        (m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
        (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w,
    ))
}

/// Similarity that moves the centroid to the origin and the mean distance to √2.
fn hartley_transform(points: impl Iterator<Item = Point> + Clone) -> Result<[[f64; 3]; 3], GeometryError> {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(ax, ay), p| (ax + p.x, ay + p.y));
    let (cx, cy) = (sx / n, sy / n);
    let mean_dist = points.map(|p| libm::hypot(p.x - cx, p.y - cy)).sum::<f64>() / n;
    if !(mean_dist > 0.0) || !mean_dist.is_finite() {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let s = core::f64::consts::SQRT_2 / mean_dist;
    Ok([[s, 0.0, -s * cx], [0.0, s, -s * cy], [0.0, 0.0, 1.0]])
}

fn apply_similarity(t: &[[f64; 3]; 3], p: Point) -> Point {
    Point::new(t[0][0] * p.x + t[0][2], t[1][1] * p.y + t[1][2])
}

fn has_collinear_triple(points: &[Point]) -> bool {
    let extent = points.iter().flat_map(|p| [p.x.abs(), p.y.abs()]).fold(1.0f64, f64::max);
    let tol = 1e-10 * extent * extent;
    let n = points.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (a, b, c) = (points[i], points[j], points[k]);
                let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
                if cross.abs() <= tol {
                    return true;
                }
            }
        }
    }
    false
}

/// Least-squares homography mapping every `src` onto its `dst`.
///
/// Both point sets are Hartley-normalised, the algebraic system is solved as
/// the eigenvector of the smallest eigenvalue of the 9×9 normal matrix, and
/// the normalisation is undone afterwards.
pub fn estimate_homography_dlt(pairs: &[PointPair]) -> Result<Homography, GeometryError> {
    if pairs.len() < 4 {
        return Err(GeometryError::TooFewPairs(pairs.len()));
    }
    if pairs.iter().any(|p| !p.src.is_finite() || !p.dst.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    if pairs.len() == 4 {
        let src: Vec<Point> = pairs.iter().map(|p| p.src).collect();
        let dst: Vec<Point> = pairs.iter().map(|p| p.dst).collect();
        if has_collinear_triple(&src) || has_collinear_triple(&dst) {
            return Err(GeometryError::DegenerateConfiguration);
        }
    }
    let t_src = hartley_transform(pairs.iter().map(|p| p.src))?;
    let t_dst = hartley_transform(pairs.iter().map(|p| p.dst))?;

    let mut normal = Matrix::zeros(9, 9);
    for pair in pairs {
        let s = apply_similarity(&t_src, pair.src);
        let d = apply_similarity(&t_dst, pair.dst);
        let rows = [
            [-s.x, -s.y, -1.0, 0.0, 0.0, 0.0, d.x * s.x, d.x * s.y, d.x],
            [0.0, 0.0, 0.0, -s.x, -s.y, -1.0, d.y * s.x, d.y * s.y, d.y],
        ];
        for r in &rows {
            for i in 0..9 {
                if r[i] == 0.0 {
                    continue;
                }
                for j in 0..9 {
                    normal[(i, j)] += r[i] * r[j];
                }
            }
        }
    }
    let eig = symmetric_eigen(&normal, true).map_err(|_| GeometryError::DegenerateConfiguration)?;
    let top = eig.values[8].abs().max(f64::MIN_POSITIVE);
    // A second (near-)null direction means the solution is not unique.
    if eig.values[1] <= 1e-12 * top {
        return Err(GeometryError::DegenerateConfiguration);
    }
    let v = eig.vectors.as_ref().expect("requested eigenvectors").row(0);
    let hn = [[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]];

    // H = T_dst⁻¹ · Hn · T_src
    let s_inv = 1.0 / t_dst[0][0];
    let t_dst_inv = [[s_inv, 0.0, -t_dst[0][2] * s_inv], [0.0, s_inv, -t_dst[1][2] * s_inv], [0.0, 0.0, 1.0]];
    let h = Homography::from_matrix_unchecked(t_dst_inv)
        .compose(&Homography::from_matrix_unchecked(hn))
        .compose(&Homography::from_matrix_unchecked(t_src));
    Homography::from_matrix(h.m).map_err(|e| match e {
        GeometryError::SingularHomography => GeometryError::DegenerateConfiguration,
        other => other,
    })
}

/// Mean of the forward (`‖H·src − dst‖`) and backward (`‖H⁻¹·dst − src‖`)
/// transfer distances, in pixels. Infinite when either side projects to
/// infinity.
pub fn symmetric_transfer_error(h: &Homography, h_inv: &Homography, pair: &PointPair) -> f64 {
    let forward = match h.project(pair.src) {
        Ok(p) => p.distance(pair.dst),
        Err(_) => return f64::INFINITY,
    };
    let backward = match h_inv.project(pair.dst) {
        Ok(p) => p.distance(pair.src),
        Err(_) => return f64::INFINITY,
    };
    0.5 * (forward + backward)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacParams {
    pub iterations: u32,
    /// Inlier bound on [`symmetric_transfer_error`], in pixels.
    pub inlier_threshold: f64,
    pub seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self { iterations: 2000, inlier_threshold: 3.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansacResult {
    pub homography: Homography,
    pub inliers: Vec<bool>,
    pub inlier_count: usize,
    /// Mean symmetric transfer error over the inliers.
    pub mean_inlier_error: f64,
}

struct Consensus {
    flags: Vec<bool>,
    count: usize,
    total_error: f64,
}

fn consensus(h: &Homography, pairs: &[PointPair], threshold: f64) -> Option<Consensus> {
    let inv = h.inverse().ok()?;
    let mut flags = vec![false; pairs.len()];
    let mut count = 0;
    let mut total_error = 0.0;
    for (flag, pair) in flags.iter_mut().zip(pairs) {
        let e = symmetric_transfer_error(h, &inv, pair);
        if e < threshold {
            *flag = true;
            count += 1;
            total_error += e;
        }
    }
    Some(Consensus { flags, count, total_error })
}

fn better(candidate: &Consensus, best: &Option<(Homography, Consensus)>) -> bool {
    match best {
        None => candidate.count > 0,
        Some((_, b)) => {
            candidate.count > b.count || (candidate.count == b.count && candidate.total_error < b.total_error)
        }
    }
}

/// Robust homography from putative matches.
///
/// Each iteration fits a minimal 4-pair sample drawn with SplitMix64 from
/// `seed`; the hypothesis with most inliers wins (ties go to the lower summed
/// transfer error) and is refit on all of its inliers.
pub fn ransac_homography(pairs: &[PointPair], params: &RansacParams) -> Result<RansacResult, GeometryError> {
    if pairs.len() < 4 {
        return Err(GeometryError::TooFewPairs(pairs.len()));
    }
    if params.iterations == 0 {
        return Err(GeometryError::InvalidParameter("iterations must be at least 1"));
    }
    if !(params.inlier_threshold > 0.0) {
        return Err(GeometryError::InvalidParameter("inlier threshold must be positive"));
    }
    let mut rng = SplitMix64::new(params.seed);
    let n = pairs.len();
    let mut best: Option<(Homography, Consensus)> = None;
    let mut sample = [PointPair::new(Point::default(), Point::default()); 4];
    for _ in 0..params.iterations {
        let mut idx = [0usize; 4];
        for k in 0..4 {
            loop {
                let candidate = rng.below(n as u64) as usize;
                if !idx[..k].contains(&candidate) {
                    idx[k] = candidate;
                    break;
                }
            }
        }
        for (slot, &i) in sample.iter_mut().zip(&idx) {
            *slot = pairs[i];
        }
        let Ok(h) = estimate_homography_dlt(&sample) else { continue };
        let Some(c) = consensus(&h, pairs, params.inlier_threshold) else { continue };
        if better(&c, &best) {
            best = Some((h, c));
        }
    }
    let (mut h, mut c) = best.ok_or(GeometryError::NoConsensus(0))?;
    if c.count < 4 {
        return Err(GeometryError::NoConsensus(c.count));
    }
    let inlier_pairs: Vec<PointPair> = pairs.iter().zip(&c.flags).filter(|(_, &f)| f).map(|(p, _)| *p).collect();
    if let Ok(refit) = estimate_homography_dlt(&inlier_pairs) {
        if let Some(rc) = consensus(&refit, pairs, params.inlier_threshold) {
            if rc.count >= c.count {
                h = refit;
                c = rc;
            }
        }
    }
    Ok(RansacResult {
        homography: h,
        mean_inlier_error: c.total_error / c.count as f64,
        inlier_count: c.count,
        inliers: c.flags,
    })
}
