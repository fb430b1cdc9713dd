use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat, RgbImage};

use crate::error::{Error, Result};
use crate::image::{Encoding, Image, ImageSpec};

/// Luminance at or above this is white when binarizing.
pub const BW_THRESHOLD: u8 = 128;

fn to_image(decoded: DynamicImage, encoding: Encoding) -> Result<Image> {
    let (width, height) = (decoded.width(), decoded.height());
    let spec = ImageSpec {
        width,
        height,
        encoding,
    };
    let pixels = match encoding {
        Encoding::Bw => decoded
            .to_luma8()
            .into_raw()
            .into_iter()
            .map(|l| u8::from(l < BW_THRESHOLD))
            .collect(),
        Encoding::Rgb => decoded.to_rgb8().into_raw(),
    };
    Image::from_pixels(spec, pixels)
}

/// Decodes a PNG or JPEG at its native size. BW targets are binarized by
/// luminance (`>= 128` is white).
pub fn decode_any(bytes: &[u8], encoding: Encoding) -> Result<Image> {
    let decoded = image::load_from_memory(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    to_image(decoded, encoding)
}

/// Decodes `bytes` and checks the result against `expected`.
pub fn load_image(bytes: &[u8], expected: ImageSpec) -> Result<Image> {
    let img = decode_any(bytes, expected.encoding)?;
    if img.spec() != expected {
        return Err(Error::SpecMismatch {
            expected: expected.to_string(),
            found: img.spec().to_string(),
        });
    }
    Ok(img)
}

/// Lossless PNG: 8-bit grayscale for BW (black 0, white 255), 8-bit RGB
/// otherwise.
pub fn save_image(img: &Image) -> Result<Vec<u8>> {
    let (w, h) = (img.width(), img.height());
    let dynamic = match img.encoding() {
        Encoding::Bw => {
            let raw = img.pixels().iter().map(|&v| if v == 1 { 0 } else { 255 }).collect();
            DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, raw).expect("buffer sized by spec"))
        }
        Encoding::Rgb => {
            DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, img.pixels().to_vec()).expect("buffer sized by spec"))
        }
    };
    let mut out = Cursor::new(Vec::new());
    dynamic
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

/// Reads an image file at its native size.
pub fn read_image_file(path: &Path, encoding: Encoding) -> Result<Image> {
    decode_any(&fs::read(path)?, encoding)
}

pub fn write_image_file(path: &Path, img: &Image) -> Result<()> {
    fs::write(path, save_image(img)?)?;
    Ok(())
}
