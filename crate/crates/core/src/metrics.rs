//! ISO/IEC 30107-3 error rates over classifier scores.
//!
//! A presentation is classified as an attack when its score is at least the
//! threshold `τ`. Label 0 is bona fide; labels `j ≥ 1` are attack
//! instrument species (PAIs). All rates are percentages.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no attack presentations among the records")]
    NoAttackRecords,
    #[error("no bona fide presentations among the records")]
    NoBonaFideRecords,
    #[error("both bona fide and attack presentations are required")]
    MissingClass,
    #[error("score of {id:?} is {score}, expected a finite value in [0, 1]")]
    InvalidScore { id: String, score: f64 },
    #[error("probit is defined on (0, 1), got {0}")]
    OutOfDomain(f64),
    #[error("operating point AP must be at least 1")]
    InvalidOperatingPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub presentation_id: String,
    pub label: u32,
    /// Claimed probability of attack.
    pub score: f64,
}

impl ScoreRecord {
    pub fn new(presentation_id: impl Into<String>, label: u32, score: f64) -> Self {
        Self { presentation_id: presentation_id.into(), label, score }
    }

    pub fn is_bona_fide(&self) -> bool {
        self.label == 0
    }
}

/// Which end of the score range means "attack".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScorePolarity {
    #[default]
    AttackHigh,
    BonaFideHigh,
}

impl ScorePolarity {
    /// Maps a raw score onto the attack-high convention.
    pub fn normalize(self, score: f64) -> f64 {
        match self {
            ScorePolarity::AttackHigh => score,
            ScorePolarity::BonaFideHigh => 1.0 - score,
        }
    }
}

pub fn validate_scores(records: &[ScoreRecord]) -> Result<(), MetricsError> {
    match records.iter().find(|r| !(r.score.is_finite() && (0.0..=1.0).contains(&r.score))) {
        Some(r) => Err(MetricsError::InvalidScore { id: r.presentation_id.clone(), score: r.score }),
        None => Ok(()),
    }
}

fn percent(count: usize, total: usize) -> f64 {
    100.0 * count as f64 / total as f64
}

/// APCER of every PAI present in `records` at threshold `tau`.
pub fn apcer_per_pai(records: &[ScoreRecord], tau: f64) -> Result<BTreeMap<u32, f64>, MetricsError> {
    let mut counts: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.is_bona_fide()) {
        let entry = counts.entry(r.label).or_default();
        entry.1 += 1;
        if r.score < tau {
            entry.0 += 1;
        }
    }
    if counts.is_empty() {
        return Err(MetricsError::NoAttackRecords);
    }
    Ok(counts.into_iter().map(|(j, (missed, total))| (j, percent(missed, total))).collect())
}

/// Worst-case APCER over the PAIs.
pub fn apcer_max(records: &[ScoreRecord], tau: f64) -> Result<f64, MetricsError> {
    Ok(apcer_per_pai(records, tau)?.values().fold(0.0, |a, &b| f64::max(a, b)))
}

pub fn bpcer(records: &[ScoreRecord], tau: f64) -> Result<f64, MetricsError> {
    let (mut rejected, mut total) = (0, 0);
    for r in records.iter().filter(|r| r.is_bona_fide()) {
        total += 1;
        if r.score >= tau {
            rejected += 1;
        }
    }
    if total == 0 {
        return Err(MetricsError::NoBonaFideRecords);
    }
    Ok(percent(rejected, total))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetPoint {
    pub threshold: f64,
    pub apcer_max: f64,
    pub bpcer: f64,
    /// Per-PAI APCER, in the order of [`DetCurve::pais`].
    pub apcer: Vec<f64>,
}

/// Error rates at every distinct score, in ascending threshold order,
/// bracketed by `-∞` (everything an attack) and `+∞` (everything bona fide).
#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve {
    pub pais: Vec<u32>,
    pub points: Vec<DetPoint>,
}

pub fn compute_det(records: &[ScoreRecord]) -> Result<DetCurve, MetricsError> {
    validate_scores(records)?;
    let bona: Vec<f64> = records.iter().filter(|r| r.is_bona_fide()).map(|r| r.score).collect();
    let mut by_pai: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.is_bona_fide()) {
        by_pai.entry(r.label).or_default().push(r.score);
    }
    if bona.is_empty() || by_pai.is_empty() {
        return Err(MetricsError::MissingClass);
    }
    let mut bona = bona;
    bona.sort_by(f64::total_cmp);
    for scores in by_pai.values_mut() {
        scores.sort_by(f64::total_cmp);
    }
    let mut thresholds: Vec<f64> = records.iter().map(|r| r.score).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let pais: Vec<u32> = by_pai.keys().copied().collect();
    let attack_lists: Vec<&Vec<f64>> = by_pai.values().collect();
    let make_point = |threshold: f64, below_bona: usize, below: &[usize]| {
        let apcer: Vec<f64> = below.iter().zip(&attack_lists).map(|(&n, list)| percent(n, list.len())).collect();
        DetPoint {
            threshold,
            apcer_max: apcer.iter().fold(0.0, |a, &b| f64::max(a, b)),
            bpcer: percent(bona.len() - below_bona, bona.len()),
            apcer,
        }
    };

    let mut points = Vec::with_capacity(thresholds.len() + 2);
    let mut below = vec![0usize; pais.len()];
    let mut below_bona = 0usize;
    points.push(make_point(f64::NEG_INFINITY, 0, &below));
    for &tau in &thresholds {
        while below_bona < bona.len() && bona[below_bona] < tau {
            below_bona += 1;
        }
        for (n, list) in below.iter_mut().zip(&attack_lists) {
            while *n < list.len() && list[*n] < tau {
                *n += 1;
            }
        }
        points.push(make_point(tau, below_bona, &below));
    }
    let all: Vec<usize> = attack_lists.iter().map(|l| l.len()).collect();
    points.push(make_point(f64::INFINITY, bona.len(), &all));
    Ok(DetCurve { pais, points })
}

/// Equal error rate on the worst-case APCER.
///
/// Returns the first point where APCER equals BPCER, otherwise the crossing
/// of the segment joining the last point with APCER < BPCER to the next one.
pub fn compute_eer(curve: &DetCurve) -> f64 {
    let pts = &curve.points;
    for k in 0..pts.len() {
        let (a2, b2) = (pts[k].apcer_max, pts[k].bpcer);
        if a2 == b2 {
            return a2;
        }
        if a2 > b2 {
            if k == 0 {
                return a2.min(b2);
            }
            let (a1, b1) = (pts[k - 1].apcer_max, pts[k - 1].bpcer);
            let t = (b1 - a1) / ((a2 - a1) - (b2 - b1));
            return a1 + t * (a2 - a1);
        }
    }
    // Unreachable for curves built by `compute_det`: the +∞ point has
    // APCER 100 and BPCER 0.
    pts.last().map_or(0.0, |p| p.apcer_max.max(p.bpcer))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub bpcer: f64,
    /// The target APCER is met only by rejecting every bona fide
    /// presentation; `bpcer` is then 100.
    pub saturated: bool,
}

/// BPCER at APCER = 100/`ap` percent (BPCER10, BPCER20, BPCER100 for `ap`
/// 10, 20, 100).
///
/// Anchored at the largest threshold whose APCER does not exceed the target
/// and linearly interpolated toward the next point, where APCER exceeds it.
pub fn bpcer_at_ap(curve: &DetCurve, ap: u32) -> Result<OperatingPoint, MetricsError> {
    if ap == 0 {
        return Err(MetricsError::InvalidOperatingPoint);
    }
    let target = 100.0 / ap as f64;
    let pts = &curve.points;
    let Some(k) = pts.iter().rposition(|p| p.apcer_max <= target) else {
        return Ok(OperatingPoint { bpcer: 100.0, saturated: true });
    };
    let anchor = &pts[k];
    if anchor.bpcer >= 100.0 {
        return Ok(OperatingPoint { bpcer: 100.0, saturated: true });
    }
    let bpcer = match pts.get(k + 1) {
        Some(next) if anchor.apcer_max < target => {
            let t = (target - anchor.apcer_max) / (next.apcer_max - anchor.apcer_max);
            anchor.bpcer + t * (next.bpcer - anchor.bpcer)
        }
        _ => anchor.bpcer,
    };
    Ok(OperatingPoint { bpcer, saturated: false })
}

/// Headline numbers for one score file.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub eer: f64,
    pub bpcer10: OperatingPoint,
    pub bpcer20: OperatingPoint,
    pub bpcer100: OperatingPoint,
}

pub fn summarize(curve: &DetCurve) -> Summary {
    let at = |ap| bpcer_at_ap(curve, ap).expect("ap is non-zero");
    Summary { eer: compute_eer(curve), bpcer10: at(10), bpcer20: at(20), bpcer100: at(100) }
}

/// Inverse of the standard normal CDF, Φ⁻¹(p).
///
/// Acklam's rational approximation refined by one Halley step against
/// `erfc`; the upper half is computed through `1 − p`, which is exact there.
pub fn probit(p: f64) -> Result<f64, MetricsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MetricsError::OutOfDomain(p));
    }
    if p > 0.5 {
        return Ok(-probit_lower(1.0 - p));
    }
    Ok(probit_lower(p))
}

fn probit_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const P_LOW: f64 = 0.02425;

    if p == 0.5 {
        return 0.0;
    }
    let x = if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / core::f64::consts::SQRT_2) - p;
    let u = e * libm::sqrt(2.0 * core::f64::consts::PI) * libm::exp(0.5 * x * x);
    x - u / (1.0 + 0.5 * x * u)
}
