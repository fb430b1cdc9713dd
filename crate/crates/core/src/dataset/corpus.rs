use std::collections::HashSet;

use crate::image::{Encoding, Image, ImageSpec};

/// Luminance view of one pixel: BW maps white to 255 and black to 0.
fn channel_values(img: &Image) -> Vec<u8> {
    match img.encoding() {
        Encoding::Bw => img.pixels().iter().map(|&v| if v == 1 { 0 } else { 255 }).collect(),
        Encoding::Rgb => img.pixels().to_vec(),
    }
}

fn convert(img: &Image, encoding: Encoding) -> Image {
    if img.encoding() == encoding {
        return img.clone();
    }
    let spec = ImageSpec { encoding, ..img.spec() };
    let pixels = match encoding {
        Encoding::Rgb => channel_values(img).into_iter().flat_map(|l| [l, l, l]).collect(),
        Encoding::Bw => img
            .pixels()
            .chunks_exact(3)
            .map(|p| {
                let luma = 0.2126 * f64::from(p[0]) + 0.7152 * f64::from(p[1]) + 0.0722 * f64::from(p[2]);
                u8::from(luma.round() < 128.0)
            })
            .collect(),
    };
    Image::from_pixels(spec, pixels).expect("converted buffer matches spec")
}

/// Bilinear resampling with pixel-centre alignment and edge clamping.
///
/// Sizes equal to the source return an identical image. BW images are
/// interpolated as luminance and re-binarized at 128.
pub fn resize_bilinear(img: &Image, width: u32, height: u32) -> Image {
    let spec = ImageSpec {
        width,
        height,
        encoding: img.encoding(),
    };
    if img.width() == width && img.height() == height {
        return img.clone();
    }
    let c = img.encoding().channels();
    let src = channel_values(img);
    let (sw, sh) = (img.width() as usize, img.height() as usize);
    let axis = |dst: u32, dst_len: u32, src_len: usize| {
        let pos = (f64::from(dst) + 0.5) * src_len as f64 / f64::from(dst_len) - 0.5;
        let pos = pos.clamp(0.0, (src_len - 1) as f64);
        let i0 = pos.floor() as usize;
        let i1 = (i0 + 1).min(src_len - 1);
        (i0, i1, pos - i0 as f64)
    };
    let xs: Vec<_> = (0..width).map(|x| axis(x, width, sw)).collect();
    let mut out = Vec::with_capacity(spec.value_count());
    for y in 0..height {
        let (y0, y1, fy) = axis(y, height, sh);
        for &(x0, x1, fx) in &xs {
            for ch in 0..c {
                let at = |xx: usize, yy: usize| f64::from(src[(yy * sw + xx) * c + ch]);
                let top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
                let bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
                let v = (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8;
                out.push(match img.encoding() {
                    Encoding::Bw => u8::from(v < 128),
                    Encoding::Rgb => v,
                });
            }
        }
    }
    Image::from_pixels(spec, out).expect("resized buffer matches spec")
}

/// Drops exact duplicates (by decoded content), converts to the target
/// encoding and resizes to the target dimensions, keeping first-occurrence
/// order. Images that only become identical after resizing are also
/// collapsed, which makes the operation idempotent.
pub fn preprocess_corpus(images: &[Image], target: ImageSpec) -> Vec<Image> {
    let mut seen_raw = HashSet::new();
    let mut seen_out = HashSet::new();
    let mut out = Vec::new();
    for img in images {
        if !seen_raw.insert(img.content_hash()) {
            continue;
        }
        let resized = resize_bilinear(&convert(img, target.encoding), target.width, target.height);
        if seen_out.insert(resized.content_hash()) {
            out.push(resized);
        }
    }
    out
}
