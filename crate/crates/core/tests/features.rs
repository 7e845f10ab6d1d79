mod common;

use std::f64::consts::{FRAC_PI_2, TAU};

use common::checkerboard;
use padbench_core::features::{
    compute_descriptors, detect_keypoints, fast_score, intensity_centroid_angle, match_descriptors, Descriptor256,
    FeatureError, Keypoint, BORDER,
};
use padbench_core::imaging::ImageBuffer;
use padbench_core::rng::SplitMix64;
use proptest::prelude::*;

/// Radius-3 Bresenham circle, listed counter-clockwise from 3 o'clock.
const RING: [(i64, i64); 16] = [
    (3, 0),
    (3, -1),
    (2, -2),
    (1, -3),
    (0, -3),
    (-1, -3),
    (-2, -2),
    (-3, -1),
    (-3, 0),
    (-3, 1),
    (-2, 2),
    (-1, 3),
    (0, 3),
    (1, 3),
    (2, 2),
    (3, 1),
];

/// Segment test at threshold `t` by counting runs around the doubled ring.
fn is_corner(gray: &ImageBuffer, x: i64, y: i64, t: i32) -> bool {
    let p = gray.get(x as u32, y as u32, 0) as i32;
    let class = |k: usize| {
        let (dx, dy) = RING[k % 16];
        let v = gray.get((x + dx) as u32, (y + dy) as u32, 0) as i32;
        if v > p + t {
            1
        } else if v < p - t {
            -1
        } else {
            0
        }
    };
    let (mut run, mut last) = (0, 0);
    for k in 0..32 {
        let c = class(k);
        run = if c != 0 && c == last { run + 1 } else if c != 0 { 1 } else { 0 };
        last = c;
        if run >= 9 {
            return true;
        }
    }
    false
}

fn random_gray(seed: u64, w: u32, h: u32) -> ImageBuffer {
    let mut rng = SplitMix64::new(seed);
    // Blocky noise so that both corners and non-corners occur.
    let cells: Vec<u8> = (0..(w / 3 + 1) * (h / 3 + 1)).map(|_| rng.below(256) as u8).collect();
    ImageBuffer::from_fn(w, h, 1, |x, y, _| cells[((y / 3) * (w / 3 + 1) + x / 3) as usize]).unwrap()
}

fn gray_checkerboard(seed: u64) -> ImageBuffer {
    checkerboard(320, 320, seed, 2.0).to_gray()
}

/// Rotation by +90° in image coordinates: `(x, y)` moves to `(h-1-y, x)`.
fn rotate90(img: &ImageBuffer) -> ImageBuffer {
    let (w, h) = (img.width(), img.height());
    ImageBuffer::from_fn(h, w, 1, |x, y, _| img.get(y, h - 1 - x, 0)).unwrap()
}

#[test]
fn fast_score_matches_the_segment_test() {
    for seed in 0..4 {
        let gray = random_gray(seed, 40, 40);
        let mut corners = 0;
        for y in 3..37 {
            for x in 3..37 {
                let score = fast_score(&gray, x as u32, y as u32);
                let oracle = (0..=255).rev().find(|&t| is_corner(&gray, x, y, t));
                match oracle {
                    Some(t) => {
                        corners += 1;
                        assert_eq!(score, t, "pixel ({x}, {y})");
                    }
                    None => assert!(score < 0, "pixel ({x}, {y}) scored {score}"),
                }
            }
        }
        assert!(corners > 20);
    }
}

#[test]
fn keypoints_respect_border_order_and_budget() {
    let gray = gray_checkerboard(1);
    let all = detect_keypoints(&gray, 20, usize::MAX).unwrap();
    assert!(all.len() > 40);
    let lo = BORDER as f64;
    for kp in &all {
        assert!(kp.x >= lo && kp.y >= lo && kp.x <= 319.0 - lo && kp.y <= 319.0 - lo);
        assert!(kp.response > 0.0);
        assert!((0.0..TAU).contains(&kp.angle));
        assert!(fast_score(&gray, kp.x as u32, kp.y as u32) >= 20);
    }
    assert!(all.windows(2).all(|w| w[0].response >= w[1].response));
    let top = detect_keypoints(&gray, 20, 25).unwrap();
    assert_eq!(top[..], all[..25]);
}

#[test]
fn detector_input_errors() {
    let rgb = ImageBuffer::filled(64, 64, 3, 0).unwrap();
    assert_eq!(detect_keypoints(&rgb, 20, 10), Err(FeatureError::NotGrayscale(3)));
    let small = ImageBuffer::filled(31, 64, 1, 0).unwrap();
    assert!(matches!(detect_keypoints(&small, 20, 10), Err(FeatureError::ImageTooSmall { .. })));
    let gray = ImageBuffer::filled(64, 64, 1, 0).unwrap();
    assert_eq!(detect_keypoints(&gray, 0, 10), Err(FeatureError::InvalidThreshold));
    assert!(detect_keypoints(&gray, 20, 10).unwrap().is_empty());
    let edge = Keypoint { x: 5.0, y: 30.0, response: 1.0, angle: 0.0 };
    assert_eq!(compute_descriptors(&gray, &[edge], true), Err(FeatureError::KeypointTooCloseToBorder { index: 0 }));
}

#[test]
fn orientation_follows_a_quarter_turn() {
    let gray = gray_checkerboard(2);
    let rotated = rotate90(&gray);
    let h = gray.height() as i64;
    for kp in detect_keypoints(&gray, 20, 100).unwrap() {
        let (x, y) = (kp.x as i64, kp.y as i64);
        let a = intensity_centroid_angle(&gray, x, y);
        let b = intensity_centroid_angle(&rotated, h - 1 - y, x);
        let d = (b - a - FRAC_PI_2).rem_euclid(TAU);
        assert!(d.min(TAU - d) < 1e-9, "angles {a} and {b}");
        assert_eq!(a, kp.angle);
    }
}

#[test]
fn steering_makes_descriptors_rotation_invariant() {
    let gray = gray_checkerboard(3);
    let rotated = rotate90(&gray);
    let h = gray.height() as f64;
    let kps = detect_keypoints(&gray, 20, 100).unwrap();
    let moved: Vec<Keypoint> = kps
        .iter()
        .map(|kp| {
            let (x, y) = (h - 1.0 - kp.y, kp.x);
            Keypoint { x, y, angle: intensity_centroid_angle(&rotated, x as i64, y as i64), ..*kp }
        })
        .collect();
    let mean = |steer: bool| {
        let a = compute_descriptors(&gray, &kps, steer).unwrap();
        let b = compute_descriptors(&rotated, &moved, steer).unwrap();
        a.iter().zip(&b).map(|(x, y)| x.hamming(y) as f64).sum::<f64>() / a.len() as f64
    };
    let (steered, plain) = (mean(true), mean(false));
    assert!(steered < 8.0, "steered mean distance {steered}");
    assert!(plain > 4.0 * steered.max(1.0), "unsteered mean distance {plain}");
}

#[test]
fn matching_recovers_a_permutation() {
    let gray = gray_checkerboard(4);
    let kps = detect_keypoints(&gray, 20, 200).unwrap();
    let desc = compute_descriptors(&gray, &kps, true).unwrap();
    let mut rng = SplitMix64::new(9);
    let mut perm: Vec<usize> = (0..desc.len()).collect();
    rng.shuffle(&mut perm);
    let shuffled: Vec<Descriptor256> = perm.iter().map(|&i| desc[i]).collect();
    let distinct = desc.iter().collect::<std::collections::HashSet<_>>().len() == desc.len();
    assert!(distinct);
    let matches = match_descriptors(&desc, &shuffled, 0, true);
    assert_eq!(matches.len(), desc.len());
    for m in &matches {
        assert_eq!(perm[m.index_b], m.index_a);
        assert_eq!(m.distance, 0);
    }
}

#[test]
fn matching_honours_distance_and_cross_check() {
    let d = |bits: &[usize]| {
        let mut v = [0u8; 32];
        for &b in bits {
            v[b / 8] |= 1 << (b % 8);
        }
        Descriptor256(v)
    };
    let a = [d(&[]), d(&[0, 1, 2, 3, 4, 5])];
    let b = [d(&[0])];
    // Both queries have b[0] as nearest; only a[0] survives the cross check.
    let loose = match_descriptors(&a, &b, 256, false);
    assert_eq!(loose.len(), 2);
    let checked = match_descriptors(&a, &b, 256, true);
    assert_eq!(checked.len(), 1);
    assert_eq!((checked[0].index_a, checked[0].distance), (0, 1));
    assert!(match_descriptors(&a, &b, 0, false).is_empty());
    assert!(match_descriptors(&a, &[], 256, true).is_empty());
}

fn arb_descriptor() -> impl Strategy<Value = Descriptor256> {
    any::<[u8; 32]>().prop_map(Descriptor256)
}

proptest! {
    #[test]
    fn hamming_is_a_metric(a in arb_descriptor(), b in arb_descriptor(), c in arb_descriptor()) {
        let bits = |x: &Descriptor256, y: &Descriptor256| (0..256).filter(|&i| x.bit(i) != y.bit(i)).count() as u32;
        prop_assert_eq!(a.hamming(&b), bits(&a, &b));
        prop_assert_eq!(a.hamming(&b), b.hamming(&a));
        prop_assert_eq!(a.hamming(&a), 0);
        prop_assert!(a.hamming(&c) <= a.hamming(&b) + b.hamming(&c));
    }
}
