//! Frame preprocessing (rectify, mask, crop) and alignment of attack
//! presentations onto their bona fide counterparts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dataset::{ClassLabel, DocType, FrameRecord, SourceDataset, Task};
use crate::features::{
    compute_descriptors, detect_keypoints, match_descriptors, FeatureError, DEFAULT_FAST_THRESHOLD,
    DEFAULT_MAX_DISTANCE, DEFAULT_MAX_KEYPOINTS,
};
use crate::geometry::{estimate_homography_dlt, ransac_homography, Homography, Point, PointPair, RansacParams};
use crate::imaging::{apply_background_mask, center_crop, warp_perspective, ImageBuffer, ImagingError, Quad};
use crate::rng::SplitMix64;

pub const MIN_ALIGN_SIZE: u32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("document quad is degenerate")]
    DegenerateQuad,
    #[error("document quad leaves the {width}x{height} frame")]
    QuadOutOfBounds { width: u32, height: u32 },
    #[error("invalid preprocessing config: {0}")]
    InvalidConfig(&'static str),
    #[error("images must be at least 64x64 for alignment, got {width}x{height}")]
    ImageTooSmall { width: u32, height: u32 },
    #[error("images have {bona} and {attack} channels")]
    ChannelMismatch { bona: u8, attack: u8 },
    #[error("alignment failed ({reason}): {matches} matches, {inliers} inliers")]
    AlignmentFailed { reason: &'static str, matches: usize, inliers: usize, mean_error_px: f64 },
    #[error("no subject has both bona fide and attack frames")]
    NoPairableSubjects,
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub rect_width: u32,
    pub rect_height: u32,
    /// Border zeroed on the rectified image. Not given by the source
    /// protocol; 16 px is this toolkit's default.
    pub mask_margin: u32,
    pub crop_width: u32,
    pub crop_height: u32,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { rect_width: 464, rect_height: 744, mask_margin: 16, crop_width: 448, crop_height: 728 }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.rect_width == 0 || self.rect_height == 0 || self.crop_width == 0 || self.crop_height == 0 {
            return Err(PipelineError::InvalidConfig("dimensions must be positive"));
        }
        if self.crop_width > self.rect_width || self.crop_height > self.rect_height {
            return Err(PipelineError::InvalidConfig("crop exceeds the rectified size"));
        }
        if 2 * self.mask_margin as u64 >= self.rect_width.min(self.rect_height) as u64 {
            return Err(PipelineError::InvalidConfig("mask margin too large for the rectified size"));
        }
        Ok(())
    }
}

/// Homography taking frame pixels to pixels of the rectified image.
///
/// Quad corners are outline coordinates (pixel `(i, j)` covers
/// `[i, i+1] × [j, j+1]`); they map onto the outline of the
/// `rect_width × rect_height` output, and the result is expressed between
/// pixel centres.
pub fn rectification_homography(quad: &Quad, cfg: &PreprocessConfig) -> Result<Homography, PipelineError> {
    if quad.is_degenerate() {
        return Err(PipelineError::DegenerateQuad);
    }
    let (w, h) = (cfg.rect_width as f64, cfg.rect_height as f64);
    let targets = [Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)];
    let pairs: Vec<PointPair> = quad.corners.iter().zip(&targets).map(|(&s, &d)| PointPair::new(s, d)).collect();
    let outline = estimate_homography_dlt(&pairs).map_err(|_| PipelineError::DegenerateQuad)?;
    let to_centres = Homography::translation(-0.5, -0.5);
    let from_centres = Homography::translation(0.5, 0.5);
    Ok(to_centres.compose(&outline).compose(&from_centres))
}

fn check_quad_inside(frame: &ImageBuffer, quad: &Quad) -> Result<(), PipelineError> {
    let (w, h) = (frame.width() as f64, frame.height() as f64);
    let inside = quad.corners.iter().all(|p| p.x >= 0.0 && p.y >= 0.0 && p.x <= w && p.y <= h);
    if inside {
        Ok(())
    } else {
        Err(PipelineError::QuadOutOfBounds { width: frame.width(), height: frame.height() })
    }
}

/// Warps the document quad of `frame` to a `rect_width × rect_height` image.
pub fn rectify_document(frame: &ImageBuffer, quad: &Quad, cfg: &PreprocessConfig) -> Result<ImageBuffer, PipelineError> {
    cfg.validate()?;
    if quad.is_degenerate() {
        return Err(PipelineError::DegenerateQuad);
    }
    check_quad_inside(frame, quad)?;
    let h = rectification_homography(quad, cfg)?;
    Ok(warp_perspective(frame, &h, cfg.rect_width, cfg.rect_height)?)
}

fn to_rgb(img: ImageBuffer) -> ImageBuffer {
    if img.channels() == 3 {
        return img;
    }
    ImageBuffer::from_fn(img.width(), img.height(), 3, |x, y, _| img.get(x, y, 0)).expect("same dimensions")
}

/// Rectify, mask the border, centre-crop. The output always has three
/// channels; grayscale frames are replicated.
pub fn preprocess_presentation(
    frame: &ImageBuffer,
    quad: &Quad,
    cfg: &PreprocessConfig,
) -> Result<ImageBuffer, PipelineError> {
    let rectified = rectify_document(frame, quad, cfg)?;
    let masked = apply_background_mask(&rectified, cfg.mask_margin)?;
    Ok(to_rgb(center_crop(&masked, cfg.crop_width, cfg.crop_height)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignParams {
    pub fast_threshold: u8,
    pub max_keypoints: usize,
    pub max_distance: u32,
    pub cross_check: bool,
    pub ransac: RansacParams,
    pub min_matches: usize,
    pub min_inliers: usize,
    /// Largest accepted mean inlier transfer error, in pixels.
    pub max_mean_error_px: f64,
}

impl Default for AlignParams {
    fn default() -> Self {
        Self {
            fast_threshold: DEFAULT_FAST_THRESHOLD,
            max_keypoints: DEFAULT_MAX_KEYPOINTS,
            max_distance: DEFAULT_MAX_DISTANCE,
            cross_check: true,
            ransac: RansacParams::default(),
            min_matches: 10,
            min_inliers: 4,
            max_mean_error_px: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    pub matches: usize,
    pub inliers: usize,
    pub mean_error_px: f64,
    /// Maps attack pixels onto bona fide pixels.
    pub homography: Homography,
    /// Putative correspondences (attack → bona fide) with their inlier flags.
    pub correspondences: Vec<PointPair>,
    pub inlier_flags: Vec<bool>,
}

/// Estimates the homography from `attack` to `bona` with oriented binary
/// features and RANSAC, and warps `attack` into the bona fide frame.
pub fn align_attack_to_bonafide(
    bona: &ImageBuffer,
    attack: &ImageBuffer,
    params: &AlignParams,
) -> Result<(ImageBuffer, AlignmentReport), PipelineError> {
    for img in [bona, attack] {
        if img.width() < MIN_ALIGN_SIZE || img.height() < MIN_ALIGN_SIZE {
            return Err(PipelineError::ImageTooSmall { width: img.width(), height: img.height() });
        }
    }
    if bona.channels() != attack.channels() {
        return Err(PipelineError::ChannelMismatch { bona: bona.channels(), attack: attack.channels() });
    }
    let (gray_b, gray_a) = (bona.to_gray(), attack.to_gray());
    let kp_b = detect_keypoints(&gray_b, params.fast_threshold, params.max_keypoints)?;
    let kp_a = detect_keypoints(&gray_a, params.fast_threshold, params.max_keypoints)?;
    let desc_b = compute_descriptors(&gray_b, &kp_b, true)?;
    let desc_a = compute_descriptors(&gray_a, &kp_a, true)?;
    let matches = match_descriptors(&desc_a, &desc_b, params.max_distance, params.cross_check);
    let failed = |reason, inliers, mean_error_px| PipelineError::AlignmentFailed {
        reason,
        matches: matches.len(),
        inliers,
        mean_error_px,
    };
    if matches.len() < params.min_matches {
        return Err(failed("too few matches", 0, f64::NAN));
    }
    let pairs: Vec<PointPair> = matches
        .iter()
        .map(|m| {
            let (a, b) = (&kp_a[m.index_a], &kp_b[m.index_b]);
            PointPair::new(Point::new(a.x, a.y), Point::new(b.x, b.y))
        })
        .collect();
    let fit = ransac_homography(&pairs, &params.ransac).map_err(|_| failed("no consensus", 0, f64::NAN))?;
    if fit.inlier_count < params.min_inliers {
        return Err(failed("too few inliers", fit.inlier_count, fit.mean_inlier_error));
    }
    if !(fit.mean_inlier_error <= params.max_mean_error_px) {
        return Err(failed("mean error too large", fit.inlier_count, fit.mean_inlier_error));
    }
    let aligned = warp_perspective(attack, &fit.homography, bona.width(), bona.height())
        .map_err(|_| failed("singular homography", fit.inlier_count, fit.mean_inlier_error))?;
    let report = AlignmentReport {
        matches: matches.len(),
        inliers: fit.inlier_count,
        mean_error_px: fit.mean_inlier_error,
        homography: fit.homography,
        correspondences: pairs,
        inlier_flags: fit.inliers,
    };
    Ok((aligned, report))
}

/// Indices into the manifest of one bona fide frame and its attack partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresentationPair {
    pub bona: usize,
    pub attack: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<PresentationPair>,
    /// Subjects with bona fide frames but no attack frames of the task.
    pub skipped_subjects: usize,
}

/// Pairs every in-frame bona fide frame with an attack frame of the task's
/// class drawn uniformly from the same subject of the same source dataset.
///
/// Subjects are visited in `(source, doc_type, subject_id)` order and frames
/// in path order, drawing from a single SplitMix64 stream seeded by `seed`.
pub fn pair_presentations(manifest: &[FrameRecord], task: Task, seed: u64) -> Result<Pairing, PipelineError> {
    type Key = (SourceDataset, DocType, String);
    let mut groups: BTreeMap<Key, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    let attack_class = task.attack_class();
    for (i, r) in manifest.iter().enumerate() {
        if !r.in_frame {
            continue;
        }
        let key = (r.source_dataset, r.doc_type, r.subject_id.clone());
        if r.class_label == ClassLabel::BonaFide {
            groups.entry(key).or_default().0.push(i);
        } else if r.class_label == attack_class {
            groups.entry(key).or_default().1.push(i);
        }
    }
    let by_path = |a: &usize, b: &usize| manifest[*a].frame_path.cmp(&manifest[*b].frame_path).then(a.cmp(b));
    let mut rng = SplitMix64::new(seed);
    let mut pairs = Vec::new();
    let mut skipped_subjects = 0;
    for (_, (mut bona, mut attacks)) in groups {
        if bona.is_empty() {
            continue;
        }
        if attacks.is_empty() {
            skipped_subjects += 1;
            continue;
        }
        bona.sort_by(by_path);
        attacks.sort_by(by_path);
        for b in bona {
            let a = attacks[rng.below(attacks.len() as u64) as usize];
            pairs.push(PresentationPair { bona: b, attack: a });
        }
    }
    if pairs.is_empty() {
        return Err(PipelineError::NoPairableSubjects);
    }
    Ok(Pairing { pairs, skipped_subjects })
}
