mod common;

use common::{checkerboard, random_homography};
use padbench_core::geometry::Homography;
use padbench_core::imaging::{
    apply_background_mask, center_crop, center_crop_offset, warp_perspective, ImageBuffer, ImagingError, Quad,
};
use padbench_core::rng::SplitMix64;
use proptest::prelude::*;

#[test]
fn buffer_constructor_validates_its_input() {
    assert_eq!(
        ImageBuffer::new(0, 4, 1, vec![]),
        Err(ImagingError::InvalidDimensions { width: 0, height: 4 })
    );
    assert_eq!(ImageBuffer::new(2, 2, 4, vec![0; 16]), Err(ImagingError::UnsupportedChannels(4)));
    assert_eq!(
        ImageBuffer::new(2, 2, 3, vec![0; 11]),
        Err(ImagingError::DataLengthMismatch { expected: 12, actual: 11 })
    );
    let img = ImageBuffer::from_fn(3, 2, 3, |x, y, c| (10 * x + 100 * y) as u8 + c).unwrap();
    assert_eq!(img.pixel(2, 1), &[120, 121, 122]);
    assert_eq!(img.get(1, 0, 2), 12);
}

#[test]
fn gray_conversion_uses_integer_luma_weights() {
    let img = ImageBuffer::new(4, 1, 3, vec![255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 200, 30]).unwrap();
    let gray = img.to_gray();
    assert_eq!(gray.channels(), 1);
    // 0.299 * 255 = 76.2, 0.587 * 255 = 149.7, 0.114 * 255 = 29.1,
    // 0.299 * 10 + 0.587 * 200 + 0.114 * 30 = 123.81.
    assert_eq!(gray.data(), &[76, 150, 29, 124]);
    assert_eq!(gray.to_gray(), gray);
}

#[test]
fn bilinear_sampling_on_a_ramp() {
    let img = ImageBuffer::from_fn(5, 4, 1, |x, y, _| (10 * x + 40 * y) as u8).unwrap();
    assert_eq!(img.sample_bilinear(2.0, 1.0, 0), Some(60.0));
    assert_eq!(img.sample_bilinear(2.25, 1.5, 0), Some(82.5));
    // Between the outermost centre and the footprint edge the border repeats.
    assert_eq!(img.sample_bilinear(-0.5, 0.0, 0), Some(0.0));
    assert_eq!(img.sample_bilinear(4.5, 3.5, 0), Some(160.0));
    assert_eq!(img.sample_bilinear(-0.51, 0.0, 0), None);
    assert_eq!(img.sample_bilinear(0.0, 3.6, 0), None);
    assert_eq!(img.sample_bilinear(f64::NAN, 0.0, 0), None);
}

#[test]
fn identity_and_integer_shift_warps_are_exact() {
    let img = checkerboard(120, 90, 1, 4.0);
    assert_eq!(warp_perspective(&img, &Homography::identity(), 120, 90).unwrap(), img);
    let shifted = warp_perspective(&img, &Homography::translation(7.0, -3.0), 120, 90).unwrap();
    for y in 0..90 {
        for x in 0..120 {
            let expected = if x >= 7 && y + 3 < 90 { img.pixel(x - 7, y + 3).to_vec() } else { vec![0; 3] };
            assert_eq!(shifted.pixel(x, y), &expected[..], "({x}, {y})");
        }
    }
}

#[test]
fn warp_then_inverse_warp_is_close_to_the_original() {
    let mut rng = SplitMix64::new(2);
    let img = checkerboard(200, 200, 2, 0.0).to_gray();
    let h = random_homography(&mut rng, 200, 200);
    let there = warp_perspective(&img, &h, 200, 200).unwrap();
    let back = warp_perspective(&there, &h.inverse().unwrap(), 200, 200).unwrap();
    // Compare away from the borders, where both warps stay inside the source.
    let (mut total, mut n) = (0.0, 0);
    for y in 40..160 {
        for x in 40..160 {
            total += (back.get(x, y, 0) as f64 - img.get(x, y, 0) as f64).abs();
            n += 1;
        }
    }
    assert!(total / (n as f64) < 6.0, "mean abs diff {}", total / n as f64);
}

#[test]
fn singular_and_empty_warps_are_rejected() {
    let img = ImageBuffer::filled(8, 8, 1, 1).unwrap();
    let rows = [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
    assert!(Homography::from_matrix(rows).is_err());
    let flat = Homography::from_matrix_unchecked(rows);
    assert_eq!(warp_perspective(&img, &flat, 8, 8), Err(ImagingError::SingularHomography));
    assert!(matches!(
        warp_perspective(&img, &Homography::identity(), 0, 8),
        Err(ImagingError::InvalidDimensions { .. })
    ));
}

#[test]
fn quad_area_and_degeneracy() {
    let q = Quad::from_flat([0.0, 0.0, 4.0, 0.0, 4.0, 3.0, 0.0, 3.0]);
    assert_eq!(q.signed_area(), 12.0);
    assert!(!q.is_degenerate());
    assert_eq!(Quad::from_flat(q.to_flat()), q);
    assert_eq!(Quad::full_frame(4, 3), q);
    assert!(Quad::from_flat([0.0, 0.0, 2.0, 0.0, 4.0, 0.0, 0.0, 3.0]).is_degenerate());
    assert!(Quad::from_flat([0.0, 0.0, 0.0, 0.0, 4.0, 3.0, 0.0, 3.0]).is_degenerate());
    assert!(Quad::from_flat([f64::NAN, 0.0, 4.0, 0.0, 4.0, 3.0, 0.0, 3.0]).is_degenerate());
}

#[test]
fn crop_errors() {
    let img = ImageBuffer::filled(10, 6, 3, 0).unwrap();
    assert!(matches!(center_crop(&img, 11, 6), Err(ImagingError::CropLargerThanSource { .. })));
    assert!(matches!(center_crop(&img, 0, 6), Err(ImagingError::InvalidDimensions { .. })));
    assert!(matches!(apply_background_mask(&img, 3), Err(ImagingError::MarginTooLarge { .. })));
}

proptest! {
    #[test]
    fn crop_takes_the_centred_window(w in 1u32..40, h in 1u32..40, cw in 1u32..40, chh in 1u32..40) {
        prop_assume!(cw <= w && chh <= h);
        let img = ImageBuffer::from_fn(w, h, 1, |x, y, _| (x * 7 + y * 13) as u8).unwrap();
        let out = center_crop(&img, cw, chh).unwrap();
        let (ox, oy) = center_crop_offset(w, h, cw, chh);
        prop_assert_eq!((ox, oy), ((w - cw) / 2, (h - chh) / 2));
        for y in 0..chh {
            for x in 0..cw {
                prop_assert_eq!(out.get(x, y, 0), img.get(x + ox, y + oy, 0));
            }
        }
    }

    #[test]
    fn mask_zeroes_exactly_the_margin(w in 1u32..40, h in 1u32..40, margin in 0u32..20) {
        prop_assume!(2 * margin < w.min(h));
        let img = ImageBuffer::filled(w, h, 3, 200).unwrap();
        let out = apply_background_mask(&img, margin).unwrap();
        for y in 0..h {
            for x in 0..w {
                let border = x < margin || y < margin || x >= w - margin || y >= h - margin;
                prop_assert_eq!(out.pixel(x, y), if border { &[0u8, 0, 0][..] } else { &[200u8, 200, 200][..] });
            }
        }
    }
}
