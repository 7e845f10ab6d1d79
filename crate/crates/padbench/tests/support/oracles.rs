//! Reference computations that share no code with the library: brute-force
//! threshold sweeps, nalgebra eigensolvers and a direct homography solve.

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector, SymmetricEigen};
use padbench_core::imaging::{ImageBuffer, Quad};

/// Number of thresholds in the fine grid, `τ_k = (k + 0.5) / GRID`.
pub const GRID: u32 = 1_000_000;

/// Scores are integers `m / SCORE_SCALE` with `m` in `0..=SCORE_SCALE`.
pub const SCORE_SCALE: u32 = 10_000;

/// One synthetic score file with integer-valued scores.
pub struct IntScores {
    pub bona: Vec<u32>,
    /// Attack scores per PAI label, labels ascending.
    pub attacks: Vec<(u32, Vec<u32>)>,
}

/// (APCER_max, BPCER) pairs of the brute-force sweep, ascending τ, with
/// consecutive duplicates dropped and the ±∞ endpoints added.
pub fn grid_curve(s: &IntScores) -> Vec<(f64, f64)> {
    // Cumulative counts of scores <= m for m in 0..=SCORE_SCALE.
    let cumulate = |v: &[u32]| {
        let mut hist = vec![0u32; SCORE_SCALE as usize + 1];
        for &m in v {
            hist[m as usize] += 1;
        }
        let mut acc = 0;
        hist.iter()
            .map(|&h| {
                acc += h;
                acc
            })
            .collect::<Vec<u32>>()
    };
    let bona = cumulate(&s.bona);
    let attacks: Vec<(Vec<u32>, u32)> = s.attacks.iter().map(|(_, v)| (cumulate(v), v.len() as u32)).collect();
    let nb = s.bona.len() as f64;
    let mut out = vec![(0.0, 100.0)];
    let step = GRID / SCORE_SCALE;
    for k in 0..GRID {
        // m / SCORE_SCALE >= (k + 0.5) / GRID  <=>  m * step > k.
        let below = (k / step) as usize;
        let apcer = attacks.iter().map(|(c, n)| 100.0 * c[below] as f64 / *n as f64).fold(0.0, f64::max);
        let bpcer = 100.0 * (nb - bona[below] as f64) / nb;
        if out.last() != Some(&(apcer, bpcer)) {
            out.push((apcer, bpcer));
        }
    }
    if out.last() != Some(&(100.0, 0.0)) {
        out.push((100.0, 0.0));
    }
    out
}

/// EER of a sampled curve: exact equality point, else the crossing of the
/// segment where APCER − BPCER changes sign.
pub fn grid_eer(curve: &[(f64, f64)]) -> f64 {
    for w in curve.windows(2) {
        let ((a1, b1), (a2, b2)) = (w[0], w[1]);
        if a1 == b1 {
            return a1;
        }
        if a1 < b1 && a2 >= b2 {
            if a2 == b2 {
                return a2;
            }
            let d1 = b1 - a1;
            let d2 = a2 - b2;
            return a1 + (a2 - a1) * d1 / (d1 + d2);
        }
    }
    unreachable!("curve ends at APCER 100, BPCER 0")
}

/// BPCER at APCER = 100/ap on a sampled curve: (value, saturated).
pub fn grid_bpcer_at(curve: &[(f64, f64)], ap: u32) -> (f64, bool) {
    let target = 100.0 / ap as f64;
    let k = curve.iter().rposition(|&(a, _)| a <= target).expect("the -inf point has APCER 0");
    let (a, b) = curve[k];
    if b >= 100.0 {
        return (100.0, true);
    }
    if a == target || k + 1 == curve.len() {
        return (b, false);
    }
    let (a2, b2) = curve[k + 1];
    (b + (b2 - b) * (target - a) / (a2 - a), false)
}

/// Exact counts at threshold `tau`: per-PAI APCER and BPCER in percent.
pub fn count_rates(bona: &[f64], attacks: &[Vec<f64>], tau: f64) -> (Vec<f64>, f64) {
    let apcer = attacks
        .iter()
        .map(|v| 100.0 * v.iter().filter(|&&s| !(s >= tau)).count() as f64 / v.len() as f64)
        .collect();
    let bpcer = 100.0 * bona.iter().filter(|&&s| s >= tau).count() as f64 / bona.len() as f64;
    (apcer, bpcer)
}

/// Mean and unbiased covariance of `n × d` row-major data, two-pass.
pub fn moments(data: &[f32], n: usize, d: usize) -> (DVector<f64>, DMatrix<f64>) {
    let x = DMatrix::from_fn(n, d, |i, j| data[i * d + j] as f64);
    let mean = DVector::from_fn(d, |j, _| x.column(j).sum() / n as f64);
    let mut centred = x;
    for mut row in centred.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centred.transpose() * &centred / (n as f64 - 1.0);
    (mean, cov)
}

fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let roots = e.eigenvalues.map(|v| v.max(0.0).sqrt());
    &e.eigenvectors * DMatrix::from_diagonal(&roots) * e.eigenvectors.transpose()
}

/// `Tr((A B)^{1/2})` for PSD `A`, `B` through `(A^{1/2} B A^{1/2})^{1/2}`.
pub fn trace_sqrt_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let s = psd_sqrt(a);
    let m = &s * b * &s;
    let m = (&m + m.transpose()) * 0.5;
    SymmetricEigen::new(m).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// Frechet distance of two `(mean, covariance)` Gaussians.
pub fn frechet(a: &(DVector<f64>, DMatrix<f64>), b: &(DVector<f64>, DMatrix<f64>)) -> f64 {
    let diff = &a.0 - &b.0;
    diff.dot(&diff) + a.1.trace() + b.1.trace() - 2.0 * trace_sqrt_product(&a.1, &b.1)
}

/// Homography taking the unit-free rectangle outline `[0,w] × [0,h]` onto
/// the quad (outline coordinates), from the 8×8 linear system with h33 = 1.
pub fn outline_to_quad(quad: &Quad, w: f64, h: f64) -> Matrix3<f64> {
    let src = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)];
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut rhs = SVector::<f64, 8>::zeros();
    for (i, (&(x, y), c)) in src.iter().zip(&quad.corners).enumerate() {
        let (u, v) = (c.x, c.y);
        let r = 2 * i;
        a.row_mut(r).copy_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]);
        a.row_mut(r + 1).copy_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]);
        rhs[r] = u;
        rhs[r + 1] = v;
    }
    let p = a.lu().solve(&rhs).expect("non-degenerate quad");
    Matrix3::new(p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], 1.0)
}

/// Bilinear sample with pixel centres at integers; `None` outside the
/// `[-0.5, w-0.5] × [-0.5, h-0.5]` footprint, border pixels replicated
/// between the outermost centres and the footprint edge.
pub fn bilinear(img: &ImageBuffer, x: f64, y: f64, c: u8) -> Option<f64> {
    let (w, h) = (img.width() as f64, img.height() as f64);
    if x < -0.5 || y < -0.5 || x > w - 0.5 || y > h - 0.5 || x.is_nan() || y.is_nan() {
        return None;
    }
    let px = |i: f64, j: f64| {
        let i = i.clamp(0.0, w - 1.0) as u32;
        let j = j.clamp(0.0, h - 1.0) as u32;
        img.get(i, j, c) as f64
    };
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let top = px(x0, y0) * (1.0 - fx) + px(x0 + 1.0, y0) * fx;
    let bottom = px(x0, y0 + 1.0) * (1.0 - fx) + px(x0 + 1.0, y0 + 1.0) * fx;
    Some(top * (1.0 - fy) + bottom * fy)
}

/// Rectified `w × h` document sampled directly from the frame through
/// [`outline_to_quad`], pixel `(i, j)` read at its centre `(i+½, j+½)`.
pub fn rectify(frame: &ImageBuffer, quad: &Quad, w: u32, h: u32) -> ImageBuffer {
    let m = outline_to_quad(quad, w as f64, h as f64);
    ImageBuffer::from_fn(w, h, frame.channels(), |i, j, c| {
        let p = m * nalgebra::Vector3::new(i as f64 + 0.5, j as f64 + 0.5, 1.0);
        let (x, y) = (p.x / p.z - 0.5, p.y / p.z - 0.5);
        bilinear(frame, x, y, c).map_or(0, |v| v.round().clamp(0.0, 255.0) as u8)
    })
    .unwrap()
}
