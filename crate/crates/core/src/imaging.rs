//! 8-bit rasters and the pixel-level geometry used by preprocessing.
//!
//! Pixel `(x, y)` has its centre at integer coordinates; the image covers the
//! continuous domain `[-0.5, width - 0.5] × [-0.5, height - 0.5]`.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::{Homography, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImagingError {
    #[error("image dimensions must be at least 1x1 (got {width}x{height})")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(u8),
    #[error("pixel buffer has {actual} bytes, expected {expected}")]
    DataLengthMismatch { expected: usize, actual: usize },
    #[error("homography is singular")]
    SingularHomography,
    #[error("crop {crop_width}x{crop_height} larger than source {width}x{height}")]
    CropLargerThanSource { crop_width: u32, crop_height: u32, width: u32, height: u32 },
    #[error("mask margin {margin} too large for {width}x{height} image")]
    MarginTooLarge { margin: u32, width: u32, height: u32 },
}

/// Row-major, interleaved 8-bit raster with one (gray) or three (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::InvalidDimensions { width, height });
        }
        if channels != 1 && channels != 3 {
            return Err(ImagingError::UnsupportedChannels(channels));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(ImagingError::DataLengthMismatch { expected, actual: data.len() });
        }
        Ok(Self { width, height, channels, data })
    }

    /// An image with every sample set to `value`.
    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Result<Self, ImagingError> {
        let len = width as usize * height as usize * channels as usize;
        Self::new(width, height, channels, vec![value; len])
    }

    /// Builds an image by evaluating `f(x, y, channel)` for every sample.
    pub fn from_fn(
        width: u32,
        height: u32,
        channels: u8,
        mut f: impl FnMut(u32, u32, u8) -> u8,
    ) -> Result<Self, ImagingError> {
        let mut data = Vec::with_capacity(width as usize * height as usize * channels as usize);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32, channel: u8) -> u8 {
        self.data[self.offset(x, y) + channel as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, channel: u8, value: u8) {
        let o = self.offset(x, y) + channel as usize;
        self.data[o] = value;
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let o = self.offset(x, y);
        &self.data[o..o + self.channels as usize]
    }

    /// Single-channel luma using ITU-R BT.601 weights (0.299, 0.587, 0.114).
    pub fn to_gray(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| ((299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32 + 500) / 1000) as u8)
            .collect();
        ImageBuffer { width: self.width, height: self.height, channels: 1, data }
    }

    /// Bilinear sample at a continuous position. Positions outside the image
    /// footprint yield `None`; positions inside it but beyond the outermost
    /// pixel centres are clamped to the border pixels.
    pub fn sample_bilinear(&self, x: f64, y: f64, channel: u8) -> Option<f64> {
        let (w, h) = (self.width as f64, self.height as f64);
        if !(x >= -0.5 && x <= w - 0.5 && y >= -0.5 && y <= h - 0.5) {
            return None;
        }
        let x = x.clamp(0.0, w - 1.0);
        let y = y.clamp(0.0, h - 1.0);
        let x0 = libm::floor(x) as u32;
        let y0 = libm::floor(y) as u32;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let p00 = self.get(x0, y0, channel) as f64;
        let p10 = self.get(x1, y0, channel) as f64;
        let p01 = self.get(x0, y1, channel) as f64;
        let p11 = self.get(x1, y1, channel) as f64;
        let top = p00 + (p10 - p00) * fx;
        let bottom = p01 + (p11 - p01) * fx;
        Some(top + (bottom - top) * fy)
    }
}

/// Four document corners in frame coordinates: top-left, top-right,
/// bottom-right, bottom-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub corners: [Point; 4],
}

impl Quad {
    pub fn new(corners: [Point; 4]) -> Self {
        Self { corners }
    }

    /// From the flat `[x0, y0, x1, y1, x2, y2, x3, y3]` layout used by manifests.
    pub fn from_flat(v: [f64; 8]) -> Self {
        Self {
            corners: [
                Point::new(v[0], v[1]),
                Point::new(v[2], v[3]),
                Point::new(v[4], v[5]),
                Point::new(v[6], v[7]),
            ],
        }
    }

    pub fn to_flat(&self) -> [f64; 8] {
        let c = &self.corners;
        [c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y, c[3].x, c[3].y]
    }

    /// The full frame outline of a `width × height` image.
    pub fn full_frame(width: u32, height: u32) -> Self {
        let (w, h) = (width as f64, height as f64);
        Self::from_flat([0.0, 0.0, w, 0.0, w, h, 0.0, h])
    }

    /// Shoelace area (positive for clockwise order in image coordinates).
    pub fn signed_area(&self) -> f64 {
        let c = &self.corners;
        let mut acc = 0.0;
        for i in 0..4 {
            let (p, q) = (c[i], c[(i + 1) % 4]);
            acc += p.x * q.y - q.x * p.y;
        }
        0.5 * acc
    }

    /// True when any three corners are collinear (relative to the quad's extent)
    /// or the outline encloses no area.
    pub fn is_degenerate(&self) -> bool {
        let c = &self.corners;
        if c.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return true;
        }
        let extent = c
            .iter()
            .flat_map(|p| [p.x.abs(), p.y.abs()])
            .fold(1.0f64, f64::max);
        let tol = 1e-9 * extent * extent;
        for skip in 0..4 {
            let idx: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
            let (a, b, d) = (c[idx[0]], c[idx[1]], c[idx[2]]);
            let cross = (b.x - a.x) * (d.y - a.y) - (b.y - a.y) * (d.x - a.x);
            if cross.abs() <= tol {
                return true;
            }
        }
        self.signed_area().abs() <= tol
    }
}

/// Inverse-mapped perspective warp: output pixel `(x, y)` takes the bilinear
/// sample of `src` at `h⁻¹ · (x, y)`; samples outside `src` are 0.
pub fn warp_perspective(
    src: &ImageBuffer,
    h: &Homography,
    out_width: u32,
    out_height: u32,
) -> Result<ImageBuffer, ImagingError> {
    if out_width == 0 || out_height == 0 {
        return Err(ImagingError::InvalidDimensions { width: out_width, height: out_height });
    }
    let inv = h.inverse().map_err(|_| ImagingError::SingularHomography)?;
    let m = inv.matrix();
    let ch = src.channels;
    let mut out = vec![0u8; out_width as usize * out_height as usize * ch as usize];
    for y in 0..out_height {
        let yf = y as f64;
        for x in 0..out_width {
            let xf = x as f64;
            let w = m[2][0] * xf + m[2][1] * yf + m[2][2];
            if w.abs() < 1e-15 {
                continue;
            }
            let sx = (m[0][0] * xf + m[0][1] * yf + m[0][2]) / w;
            let sy = (m[1][0] * xf + m[1][1] * yf + m[1][2]) / w;
            let base = (y as usize * out_width as usize + x as usize) * ch as usize;
            for c in 0..ch {
                if let Some(v) = src.sample_bilinear(sx, sy, c) {
                    out[base + c as usize] = libm::round(v).clamp(0.0, 255.0) as u8;
                }
            }
        }
    }
    ImageBuffer::new(out_width, out_height, ch, out)
}

/// Top-left offset of a centred `w × h` window, flooring odd remainders.
pub fn center_crop_offset(src_width: u32, src_height: u32, w: u32, h: u32) -> (u32, u32) {
    ((src_width - w) / 2, (src_height - h) / 2)
}

pub fn center_crop(src: &ImageBuffer, w: u32, h: u32) -> Result<ImageBuffer, ImagingError> {
    if w > src.width || h > src.height {
        return Err(ImagingError::CropLargerThanSource {
            crop_width: w,
            crop_height: h,
            width: src.width,
            height: src.height,
        });
    }
    if w == 0 || h == 0 {
        return Err(ImagingError::InvalidDimensions { width: w, height: h });
    }
    let (ox, oy) = center_crop_offset(src.width, src.height, w, h);
    let ch = src.channels as usize;
    let mut data = Vec::with_capacity(w as usize * h as usize * ch);
    for y in oy..oy + h {
        let start = src.offset(ox, y);
        data.extend_from_slice(&src.data[start..start + w as usize * ch]);
    }
    ImageBuffer::new(w, h, src.channels, data)
}

/// Zeroes every pixel closer than `margin` to an image edge.
pub fn apply_background_mask(src: &ImageBuffer, margin: u32) -> Result<ImageBuffer, ImagingError> {
    if 2 * margin as u64 >= src.width.min(src.height) as u64 {
        return Err(ImagingError::MarginTooLarge { margin, width: src.width, height: src.height });
    }
    let mut out = src.clone();
    if margin == 0 {
        return Ok(out);
    }
    let ch = src.channels as usize;
    let row_len = src.width as usize * ch;
    for y in 0..src.height {
        let row = &mut out.data[y as usize * row_len..(y as usize + 1) * row_len];
        if y < margin || y >= src.height - margin {
            row.fill(0);
        } else {
            row[..margin as usize * ch].fill(0);
            row[row_len - margin as usize * ch..].fill(0);
        }
    }
    Ok(out)
}
