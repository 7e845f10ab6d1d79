//! Synthetic fixtures shared by the padbench integration tests.
#![allow(dead_code)]

pub mod oracles;

use std::path::Path;

use padbench_core::dataset::{ClassLabel, DocType, FrameRecord, SourceDataset};
use padbench_core::geometry::Homography;
use padbench_core::imaging::{warp_perspective, ImageBuffer, Quad};
use padbench_core::rng::SplitMix64;

pub fn uniform(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_f64()
}

/// Standard normal draw (Box-Muller).
pub fn gaussian(rng: &mut SplitMix64) -> f64 {
    let u1 = 1.0 - rng.next_f64();
    let u2 = rng.next_f64();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Checkerboard of 40 px cells, each with its own random colour, plus
/// Gaussian noise.
pub fn checkerboard(width: u32, height: u32, seed: u64, noise_sigma: f64) -> ImageBuffer {
    let mut rng = SplitMix64::new(seed);
    let cols = width.div_ceil(40) as usize;
    let rows = height.div_ceil(40) as usize;
    let tones: Vec<[u8; 3]> =
        (0..rows * cols).map(|_| [rng.below(256) as u8, rng.below(256) as u8, rng.below(256) as u8]).collect();
    let img = ImageBuffer::from_fn(width, height, 3, |x, y, c| tones[(y / 40) as usize * cols + (x / 40) as usize][c as usize])
        .unwrap();
    add_noise(&img, noise_sigma, &mut rng)
}

pub fn add_noise(img: &ImageBuffer, sigma: f64, rng: &mut SplitMix64) -> ImageBuffer {
    if sigma == 0.0 {
        return img.clone();
    }
    let data = img.data().iter().map(|&v| (v as f64 + sigma * gaussian(rng)).round().clamp(0.0, 255.0) as u8).collect();
    ImageBuffer::new(img.width(), img.height(), img.channels(), data).unwrap()
}

/// Mild projective transform about the image centre: rotation within ±8°,
/// scale 0.92 to 1.08, shift within ±15 px and a small perspective term.
pub fn random_homography(rng: &mut SplitMix64, width: u32, height: u32) -> Homography {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let theta = uniform(rng, -8.0, 8.0).to_radians();
    let s = uniform(rng, 0.92, 1.08);
    let (tx, ty) = (uniform(rng, -15.0, 15.0), uniform(rng, -15.0, 15.0));
    let (p, q) = (uniform(rng, -5e-5, 5e-5), uniform(rng, -5e-5, 5e-5));
    let core = Homography::from_matrix([
        [s * theta.cos(), -s * theta.sin(), tx],
        [s * theta.sin(), s * theta.cos(), ty],
        [p, q, 1.0],
    ])
    .unwrap();
    Homography::translation(cx, cy).compose(&core).compose(&Homography::translation(-cx, -cy))
}

pub fn warp(img: &ImageBuffer, h: &Homography) -> ImageBuffer {
    warp_perspective(img, h, img.width(), img.height()).unwrap()
}

/// Cheap textured frame: a smooth gradient per channel plus hashed grain.
pub fn textured_frame(width: u32, height: u32, seed: u64) -> ImageBuffer {
    ImageBuffer::from_fn(width, height, 3, |x, y, c| {
        let mut h = (x as u64) << 32 ^ (y as u64) << 2 ^ c as u64 ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h ^= h >> 33;
        h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
        h ^= h >> 29;
        let grain = (h & 63) as u32;
        ((x / 7 + y / 5 + c as u32 * 60 + grain) % 256) as u8
    })
    .unwrap()
}

/// Convex document quad inside a `width × height` frame, corners in
/// top-left, top-right, bottom-right, bottom-left order.
pub fn random_quad(rng: &mut SplitMix64, width: u32, height: u32) -> Quad {
    let (w, h) = (width as f64, height as f64);
    let (cx, cy) = (uniform(rng, 0.4, 0.6) * w, uniform(rng, 0.4, 0.6) * h);
    let (hw, hh) = (uniform(rng, 0.2, 0.38) * w, uniform(rng, 0.2, 0.38) * h);
    let jitter = |rng: &mut SplitMix64, v: f64| v + uniform(rng, -0.05, 0.05) * w.min(h);
    Quad::from_flat([
        jitter(rng, cx - hw),
        jitter(rng, cy - hh),
        jitter(rng, cx + hw),
        jitter(rng, cy - hh),
        jitter(rng, cx + hw),
        jitter(rng, cy + hh),
        jitter(rng, cx - hw),
        jitter(rng, cy + hh),
    ])
}

fn record(source: SourceDataset, doc: DocType, subject: u32, class: ClassLabel, frame: u32, in_frame: bool) -> FrameRecord {
    FrameRecord {
        subject_id: format!("{subject:02}"),
        doc_type: doc,
        source_dataset: source,
        class_label: class,
        frame_path: format!("{}/{}/{}/{subject:02}/{frame:03}.jpg", source.as_str(), class.as_str(), doc.as_str()),
        quad: Quad::from_flat([100.0, 100.0, 900.0, 110.0, 890.0, 1600.0, 110.0, 1590.0]),
        in_frame,
    }
}

/// Manifest shaped like the two source datasets: DLC-2021 subjects 00 to 09
/// with bona fide, print and screen clips, MIDV-2020 subjects 00 to 49 with
/// bona fide clips only, for every document type. Every tenth frame lies
/// partially outside the picture.
pub fn dataset_manifest(frames_per_clip: u32) -> Vec<FrameRecord> {
    let mut out = Vec::new();
    let mut n = 0u32;
    for &doc in DocType::ALL {
        for subject in 0..10 {
            for &class in ClassLabel::ALL {
                for f in 0..frames_per_clip {
                    n += 1;
                    out.push(record(SourceDataset::Dlc2021, doc, subject, class, f, n % 10 != 0));
                }
            }
        }
        for subject in 0..50 {
            for f in 0..frames_per_clip {
                n += 1;
                out.push(record(SourceDataset::Midv2020, doc, subject, ClassLabel::BonaFide, f, n % 10 != 0));
            }
        }
    }
    out
}

/// Writes a small aligned-capture dataset under `root`: for each subject a
/// bona fide frame and an attack frame that is the same document seen
/// through a mild homography. Returns the manifest records.
pub fn write_capture_dataset(root: &Path, subjects: u32, seed: u64) -> Vec<FrameRecord> {
    let mut rng = SplitMix64::new(seed);
    let (w, h) = (640u32, 960u32);
    let quad = Quad::from_flat([120.0, 130.0, 520.0, 130.0, 520.0, 830.0, 120.0, 830.0]);
    let mut out = Vec::new();
    for s in 0..subjects {
        let bona = checkerboard(w, h, seed ^ (s as u64) << 8, 3.0);
        let hom = random_homography(&mut rng, w, h);
        let attack = add_noise(&warp(&bona, &hom), 3.0, &mut rng);
        let mapped: Vec<f64> = quad
            .corners
            .iter()
            .flat_map(|&c| {
                let p = hom.project(padbench_core::Point::new(c.x - 0.5, c.y - 0.5)).unwrap();
                [p.x + 0.5, p.y + 0.5]
            })
            .collect();
        for (class, img, q) in [
            (ClassLabel::BonaFide, &bona, quad),
            (ClassLabel::Print, &attack, Quad::from_flat(mapped.try_into().unwrap())),
        ] {
            let mut r = record(SourceDataset::Dlc2021, DocType::EspId, s, class, 0, true);
            r.frame_path = r.frame_path.replace(".jpg", ".png");
            r.quad = q;
            padbench::image_io::save_image(img, &root.join(&r.frame_path)).unwrap();
            out.push(r);
        }
    }
    out
}
