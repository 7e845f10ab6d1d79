//! Oriented binary features: FAST-9 corners ranked by Harris response,
//! intensity-centroid orientation, steered 256-bit BRIEF descriptors and
//! Hamming matching. Single scale only.

mod pattern;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use thiserror::Error;

use crate::imaging::ImageBuffer;
use pattern::PATTERN;

/// Minimum distance in pixels between a keypoint and every image border.
pub const BORDER: u32 = 16;
/// Radius of the orientation and descriptor patch.
pub const PATCH_RADIUS: i64 = 15;
pub const MIN_IMAGE_SIZE: u32 = 32;
pub const HARRIS_K: f64 = 0.04;
const HARRIS_HALF_WINDOW: i64 = 3;

pub const DEFAULT_FAST_THRESHOLD: u8 = 20;
pub const DEFAULT_MAX_KEYPOINTS: usize = 1000;
pub const DEFAULT_MAX_DISTANCE: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("image is {width}x{height}, features need at least 32x32")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("feature detection needs a 1-channel image, got {0} channels")]
    NotGrayscale(u8),
    #[error("FAST threshold must be in 1..=255")]
    InvalidThreshold,
    #[error("keypoint {index} is closer than 16 px to the image border")]
    KeypointTooCloseToBorder { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    /// Harris corner measure, always positive.
    pub response: f64,
    /// Orientation in radians, in `[0, 2π)`.
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Descriptor256(pub [u8; 32]);

impl Descriptor256 {
    fn words(&self) -> [u64; 4] {
        let mut w = [0u64; 4];
        for (k, chunk) in self.0.chunks_exact(8).enumerate() {
            w[k] = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        w
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] >> (i % 8) & 1 == 1
    }

    pub fn hamming(&self, other: &Descriptor256) -> u32 {
        let (a, b) = (self.words(), other.words());
        a.iter().zip(&b).map(|(x, y)| (x ^ y).count_ones()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub index_a: usize,
    pub index_b: usize,
    pub distance: u32,
}

/// Bresenham circle of radius 3, clockwise from 12 o'clock.
const CIRCLE: [(i64, i64); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

fn check_gray(gray: &ImageBuffer) -> Result<(), FeatureError> {
    if gray.channels() != 1 {
        return Err(FeatureError::NotGrayscale(gray.channels()));
    }
    if gray.width() < MIN_IMAGE_SIZE || gray.height() < MIN_IMAGE_SIZE {
        return Err(FeatureError::ImageTooSmall { width: gray.width(), height: gray.height() });
    }
    Ok(())
}

#[inline]
fn at(gray: &ImageBuffer, x: i64, y: i64) -> i32 {
    gray.data()[y as usize * gray.width() as usize + x as usize] as i32
}

/// Largest threshold at which the pixel is still a FAST-9 corner (nine
/// contiguous circle pixels all brighter, or all darker, by more than the
/// threshold). Negative when no threshold qualifies.
pub fn fast_score(gray: &ImageBuffer, x: u32, y: u32) -> i32 {
    let (x, y) = (x as i64, y as i64);
    let p = at(gray, x, y);
    let mut diff = [0i32; 16];
    for (d, &(dx, dy)) in diff.iter_mut().zip(&CIRCLE) {
        *d = at(gray, x + dx, y + dy) - p;
    }
    let mut best = i32::MIN;
    for start in 0..16 {
        let mut bright = i32::MAX;
        let mut dark = i32::MAX;
        for k in 0..9 {
            let d = diff[(start + k) % 16];
            bright = bright.min(d);
            dark = dark.min(-d);
        }
        best = best.max(bright).max(dark);
    }
    best - 1
}

/// Cheap necessary condition: any 9-arc covers two cyclically adjacent
/// compass points, which must then both pass the test with the same sign.
fn fast_may_pass(gray: &ImageBuffer, x: i64, y: i64, t: i32) -> bool {
    let p = at(gray, x, y);
    let c = [at(gray, x, y - 3) - p, at(gray, x + 3, y) - p, at(gray, x, y + 3) - p, at(gray, x - 3, y) - p];
    (0..4).any(|k| {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        (a > t && b > t) || (a < -t && b < -t)
    })
}

fn harris_response(gray: &ImageBuffer, x: i64, y: i64) -> f64 {
    let norm = 1.0 / (8.0 * 255.0);
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for v in (y - HARRIS_HALF_WINDOW)..=(y + HARRIS_HALF_WINDOW) {
        for u in (x - HARRIS_HALF_WINDOW)..=(x + HARRIS_HALF_WINDOW) {
            let gx = (at(gray, u + 1, v - 1) + 2 * at(gray, u + 1, v) + at(gray, u + 1, v + 1))
                - (at(gray, u - 1, v - 1) + 2 * at(gray, u - 1, v) + at(gray, u - 1, v + 1));
            let gy = (at(gray, u - 1, v + 1) + 2 * at(gray, u, v + 1) + at(gray, u + 1, v + 1))
                - (at(gray, u - 1, v - 1) + 2 * at(gray, u, v - 1) + at(gray, u + 1, v - 1));
            let (gx, gy) = (gx as f64 * norm, gy as f64 * norm);
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    let trace = sxx + syy;
    sxx * syy - sxy * sxy - HARRIS_K * trace * trace
}

/// Angle of the vector from `(x, y)` to the intensity centroid of the
/// radius-15 disk around it.
pub fn intensity_centroid_angle(gray: &ImageBuffer, x: i64, y: i64) -> f64 {
    let (mut m10, mut m01) = (0i64, 0i64);
    for dy in -PATCH_RADIUS..=PATCH_RADIUS {
        for dx in -PATCH_RADIUS..=PATCH_RADIUS {
            if dx * dx + dy * dy > PATCH_RADIUS * PATCH_RADIUS {
                continue;
            }
            let v = at(gray, x + dx, y + dy) as i64;
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    if m10 == 0 && m01 == 0 {
        return 0.0;
    }
    let a = libm::atan2(m01 as f64, m10 as f64);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU { 0.0 } else { a }
}

/// FAST-9 corners with 3×3 non-maximum suppression on the FAST score, kept
/// when their Harris response is positive, sorted by descending response
/// (ties by row, then column) and truncated to `max_count`.
pub fn detect_keypoints(gray: &ImageBuffer, threshold: u8, max_count: usize) -> Result<Vec<Keypoint>, FeatureError> {
    check_gray(gray)?;
    if threshold == 0 {
        return Err(FeatureError::InvalidThreshold);
    }
    let t = threshold as i32;
    let (w, h) = (gray.width() as i64, gray.height() as i64);
    let lo = BORDER as i64;
    let (x_hi, y_hi) = (w - 1 - lo, h - 1 - lo);
    if x_hi < lo || y_hi < lo {
        return Ok(Vec::new());
    }
    // Scores over the candidate region plus a one-pixel rim for suppression.
    let (ox, oy) = (lo - 1, lo - 1);
    let sw = (x_hi - lo + 3) as usize;
    let sh = (y_hi - lo + 3) as usize;
    let mut scores = vec![0i32; sw * sh];
    for y in oy..oy + sh as i64 {
        for x in ox..ox + sw as i64 {
            if fast_may_pass(gray, x, y, t) {
                let s = fast_score(gray, x as u32, y as u32);
                if s >= t {
                    scores[(y - oy) as usize * sw + (x - ox) as usize] = s;
                }
            }
        }
    }
    let mut keypoints = Vec::new();
    for y in lo..=y_hi {
        for x in lo..=x_hi {
            let idx = (y - oy) as usize * sw + (x - ox) as usize;
            let s = scores[idx];
            if s == 0 {
                continue;
            }
            let suppressed = (-1i64..=1).any(|dy| {
                (-1i64..=1).any(|dx| {
                    (dx != 0 || dy != 0) && scores[(idx as i64 + dy * sw as i64 + dx) as usize] > s
                })
            });
            if suppressed {
                continue;
            }
            let response = harris_response(gray, x, y);
            if !(response > 0.0) {
                continue;
            }
            keypoints.push(Keypoint { x: x as f64, y: y as f64, response, angle: intensity_centroid_angle(gray, x, y) });
        }
    }
    // Row-major scan order already breaks ties by (y, x); the sort is stable.
    keypoints.sort_by(|a, b| b.response.total_cmp(&a.response));
    keypoints.truncate(max_count);
    Ok(keypoints)
}

/// Separable [1 4 6 4 1]² smoothing, unnormalised (scale 256), clamped edges.
fn binomial_smooth(gray: &ImageBuffer) -> Vec<u32> {
    const K: [u32; 5] = [1, 4, 6, 4, 1];
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let src = gray.data();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut tmp = vec![0u32; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = (0..5).map(|k| K[k] * src[y * w + clamp(x as isize + k as isize - 2, w)] as u32).sum();
        }
    }
    let mut out = vec![0u32; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = (0..5).map(|k| K[k] * tmp[clamp(y as isize + k as isize - 2, h) * w + x]).sum();
        }
    }
    out
}

/// One 256-bit descriptor per keypoint. With `steer`, the sampling pattern is
/// rotated by the keypoint angle (and rounded to the pixel grid) so the
/// descriptor follows the patch orientation; bit `i` is set when the smoothed
/// intensity at the first point of pair `i` is below the second.
pub fn compute_descriptors(
    gray: &ImageBuffer,
    keypoints: &[Keypoint],
    steer: bool,
) -> Result<Vec<Descriptor256>, FeatureError> {
    check_gray(gray)?;
    let (w, h) = (gray.width() as i64, gray.height() as i64);
    let lo = BORDER as i64;
    let mut centers = Vec::with_capacity(keypoints.len());
    for (index, kp) in keypoints.iter().enumerate() {
        let (cx, cy) = (libm::round(kp.x), libm::round(kp.y));
        let inside = cx.is_finite()
            && cy.is_finite()
            && cx >= lo as f64
            && cy >= lo as f64
            && cx <= (w - 1 - lo) as f64
            && cy <= (h - 1 - lo) as f64;
        if !inside {
            return Err(FeatureError::KeypointTooCloseToBorder { index });
        }
        centers.push((cx as i64, cy as i64));
    }
    let smooth = binomial_smooth(gray);
    let sample = |x: i64, y: i64| smooth[(y * w + x) as usize];
    let mut out = Vec::with_capacity(keypoints.len());
    for (kp, &(cx, cy)) in keypoints.iter().zip(&centers) {
        let (s, c) = if steer { (libm::sin(kp.angle), libm::cos(kp.angle)) } else { (0.0, 1.0) };
        let rotate = |dx: i8, dy: i8| {
            let (dx, dy) = (dx as f64, dy as f64);
            (libm::round(c * dx - s * dy) as i64, libm::round(s * dx + c * dy) as i64)
        };
        let mut d = [0u8; 32];
        for (i, p) in PATTERN.iter().enumerate() {
            let (ax, ay) = rotate(p[0], p[1]);
            let (bx, by) = rotate(p[2], p[3]);
            if sample(cx + ax, cy + ay) < sample(cx + bx, cy + by) {
                d[i / 8] |= 1 << (i % 8);
            }
        }
        out.push(Descriptor256(d));
    }
    Ok(out)
}

/// Index and distance of the closest candidate; ties go to the lowest index.
fn nearest(query: &Descriptor256, candidates: &[Descriptor256]) -> Option<(usize, u32)> {
    let mut best: Option<(usize, u32)> = None;
    for (j, c) in candidates.iter().enumerate() {
        let d = query.hamming(c);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best
}

/// Brute-force nearest-neighbour matching under Hamming distance.
///
/// Every descriptor of `a` is paired with its nearest neighbour in `b` when
/// that distance is at most `max_distance`; with `cross_check` the pair must
/// also be nearest from `b`'s side. Sorted by distance, then `index_b`, then
/// `index_a`.
pub fn match_descriptors(a: &[Descriptor256], b: &[Descriptor256], max_distance: u32, cross_check: bool) -> Vec<Match> {
    let mut matches = Vec::new();
    let mut reverse: Vec<Option<usize>> = vec![None; b.len()];
    for (i, da) in a.iter().enumerate() {
        let Some((j, distance)) = nearest(da, b) else { break };
        if distance > max_distance {
            continue;
        }
        if cross_check {
            let back = *reverse[j].get_or_insert_with(|| nearest(&b[j], a).expect("a is non-empty").0);
            if back != i {
                continue;
            }
        }
        matches.push(Match { index_a: i, index_b: j, distance });
    }
    matches.sort_by_key(|m| (m.distance, m.index_b, m.index_a));
    matches
}
