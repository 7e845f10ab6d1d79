//! Synthetic fixtures shared by the integration tests.
#![allow(dead_code)]

use padbench_core::geometry::Homography;
use padbench_core::imaging::{warp_perspective, ImageBuffer};
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
/// Gaussian noise: every cell junction is a distinct corner.
pub fn checkerboard(width: u32, height: u32, seed: u64, noise_sigma: f64) -> ImageBuffer {
    let mut rng = SplitMix64::new(seed);
    let cols = width.div_ceil(40) as usize;
    let rows = height.div_ceil(40) as usize;
    let tones: Vec<[u8; 3]> = (0..rows * cols)
        .map(|_| [rng.below(256) as u8, rng.below(256) as u8, rng.below(256) as u8])
        .collect();
    let img = ImageBuffer::from_fn(width, height, 3, |x, y, c| {
        tones[(y / 40) as usize * cols + (x / 40) as usize][c as usize]
    })
    .unwrap();
    add_noise(&img, noise_sigma, &mut rng)
}

pub fn add_noise(img: &ImageBuffer, sigma: f64, rng: &mut SplitMix64) -> ImageBuffer {
    if sigma == 0.0 {
        return img.clone();
    }
    let data = img
        .data()
        .iter()
        .map(|&v| (v as f64 + sigma * gaussian(rng)).round().clamp(0.0, 255.0) as u8)
        .collect();
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
