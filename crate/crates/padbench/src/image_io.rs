//! PNG/JPEG decoding and lossless PNG encoding of [`ImageBuffer`]s.

use std::path::Path;

use image::{ImageEncoder, ImageFormat, ImageReader};
use padbench_core::imaging::ImageBuffer;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

/// Decodes a PNG or JPEG file. JPEGs always come out with three channels;
/// PNGs keep one channel when they are grayscale. Alpha is dropped and
/// 16-bit samples are reduced to 8 bits.
pub fn load_image(path: &Path) -> Result<ImageBuffer> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let format = image::guess_format(&bytes).map_err(|_| Error::UnsupportedFormat(path.to_path_buf()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(Error::UnsupportedFormat(path.to_path_buf()));
    }
    let decoded = ImageReader::with_format(std::io::Cursor::new(&bytes), format)
        .decode()
        .map_err(|e| Error::CorruptImage { path: path.to_path_buf(), message: e.to_string() })?;
    let gray = format == ImageFormat::Png && !decoded.color().has_color();
    let (width, height, channels, data) = if gray {
        let img = decoded.into_luma8();
        (img.width(), img.height(), 1, img.into_raw())
    } else {
        let img = decoded.into_rgb8();
        (img.width(), img.height(), 3, img.into_raw())
    };
    ImageBuffer::new(width, height, channels, data)
        .map_err(|e| Error::CorruptImage { path: path.to_path_buf(), message: e.to_string() })
}

pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let color = if img.channels() == 1 { image::ExtendedColorType::L8 } else { image::ExtendedColorType::Rgb8 };
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(img.data(), img.width(), img.height(), color)
        .map_err(|e| Error::InvalidArgument(format!("PNG encoding failed: {e}")))?;
    Ok(out)
}

/// Writes `img` as PNG, atomically.
pub fn save_image(img: &ImageBuffer, path: &Path) -> Result<()> {
    let bytes = encode_png(img)?;
    write_atomic(path, |w| w.write_all(&bytes))
}
