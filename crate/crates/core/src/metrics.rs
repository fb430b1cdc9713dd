//! Completion quality, measured on the predicted (right) half only.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Encoding, Image};

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, width: u32, height: u32) -> Self {
        Rect { x, y, width, height }
    }

    fn fits(&self, img: &Image) -> bool {
        self.width > 0
            && self.height > 0
            && u64::from(self.x) + u64::from(self.width) <= u64::from(img.width())
            && u64::from(self.y) + u64::from(self.height) <= u64::from(img.height())
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}+{}+{}", self.width, self.height, self.x, self.y)
    }
}

fn same_spec(pred: &Image, truth: &Image) -> Result<()> {
    if pred.spec() != truth.spec() {
        return Err(Error::SpecMismatch {
            expected: truth.spec().to_string(),
            found: pred.spec().to_string(),
        });
    }
    Ok(())
}

/// Pairs of right-half values, row by row.
fn right_halves<'a>(pred: &'a Image, truth: &'a Image) -> impl Iterator<Item = (u8, u8)> + 'a {
    let c = truth.encoding().channels();
    let row = truth.width() as usize * c;
    let start = (truth.width() / 2) as usize * c;
    pred.pixels()
        .chunks_exact(row)
        .zip(truth.pixels().chunks_exact(row))
        .flat_map(move |(p, t)| p[start..].iter().copied().zip(t[start..].iter().copied()))
}

/// Fraction of right-half pixels on which two BW images agree.
pub fn pixel_accuracy(pred: &Image, truth: &Image) -> Result<f64> {
    same_spec(pred, truth)?;
    if truth.encoding() != Encoding::Bw {
        return Err(Error::Encoding("pixel accuracy needs BW images".into()));
    }
    let (mut hits, mut total) = (0usize, 0usize);
    for (p, t) in right_halves(pred, truth) {
        hits += usize::from(p == t);
        total += 1;
    }
    Ok(hits as f64 / total as f64)
}

/// Mean absolute difference over right-half channel values.
pub fn channel_mae(pred: &Image, truth: &Image) -> Result<f64> {
    same_spec(pred, truth)?;
    let (mut sum, mut total) = (0u64, 0usize);
    for (p, t) in right_halves(pred, truth) {
        sum += u64::from(p.abs_diff(t));
        total += 1;
    }
    Ok(sum as f64 / total as f64)
}

/// Per-channel mean over `rect` (one entry for BW, three for RGB).
pub fn region_mean(img: &Image, rect: Rect) -> Result<Vec<f64>> {
    if !rect.fits(img) {
        return Err(Error::Bounds(rect.to_string()));
    }
    let c = img.encoding().channels();
    let mut sums = vec![0u64; c];
    for y in rect.y..rect.y + rect.height {
        for x in rect.x..rect.x + rect.width {
            for (s, &v) in sums.iter_mut().zip(img.pixel(x, y)) {
                *s += u64::from(v);
            }
        }
    }
    let n = f64::from(rect.width) * f64::from(rect.height);
    Ok(sums.into_iter().map(|s| s as f64 / n).collect())
}

/// Top-right and bottom-right `size x size` corner patches.
pub fn right_corner_patches(width: u32, height: u32, size: u32) -> [Rect; 2] {
    let size = size.min(width / 2).min(height);
    [
        Rect::new(width - size, 0, size, size),
        Rect::new(width - size, height - size, size, size),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMean {
    pub name: String,
    pub rect: Rect,
    pub mean: Vec<f64>,
}

/// Scores for one completed image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub name: String,
    pub pixel_accuracy: Option<f64>,
    pub channel_mae: f64,
    pub regions: Vec<RegionMean>,
}

impl ImageScore {
    /// Accuracy (BW only), MAE, and the two right-hand 8x8 corner means.
    pub fn compute(name: &str, pred: &Image, truth: &Image) -> Result<Self> {
        let pixel_accuracy = match truth.encoding() {
            Encoding::Bw => Some(pixel_accuracy(pred, truth)?),
            Encoding::Rgb => None,
        };
        let channel_mae = channel_mae(pred, truth)?;
        let [top, bottom] = right_corner_patches(pred.width(), pred.height(), 8);
        let regions = vec![
            RegionMean {
                name: "top_right".into(),
                rect: top,
                mean: region_mean(pred, top)?,
            },
            RegionMean {
                name: "bottom_right".into(),
                rect: bottom,
                mean: region_mean(pred, bottom)?,
            },
        ];
        Ok(ImageScore {
            name: name.to_string(),
            pixel_accuracy,
            channel_mae,
            regions,
        })
    }
}

/// Aggregate over a test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub images: usize,
    pub mean_pixel_accuracy: Option<f64>,
    pub mean_channel_mae: f64,
    /// Mean over images and channels of the corner patch means.
    pub mean_corner_value: f64,
    pub warnings: Vec<String>,
    pub per_image: Vec<ImageScore>,
}

impl EvalReport {
    pub fn from_scores(per_image: Vec<ImageScore>, warnings: Vec<String>) -> Result<Self> {
        if per_image.is_empty() {
            return Err(Error::InsufficientData("no images were evaluated".into()));
        }
        let n = per_image.len() as f64;
        let accs: Vec<f64> = per_image.iter().filter_map(|s| s.pixel_accuracy).collect();
        let mean_pixel_accuracy = (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64);
        let mean_channel_mae = per_image.iter().map(|s| s.channel_mae).sum::<f64>() / n;
        let corners: Vec<f64> = per_image
            .iter()
            .flat_map(|s| s.regions.iter().flat_map(|r| r.mean.iter().copied()))
            .collect();
        let mean_corner_value = corners.iter().sum::<f64>() / corners.len() as f64;
        Ok(EvalReport {
            images: per_image.len(),
            mean_pixel_accuracy,
            mean_channel_mae,
            mean_corner_value,
            warnings,
            per_image,
        })
    }

    /// Line-oriented `key value` text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "images {}", self.images);
        if let Some(acc) = self.mean_pixel_accuracy {
            let _ = writeln!(s, "mean_pixel_accuracy {acc:.6}");
        }
        let _ = writeln!(s, "mean_channel_mae {:.6}", self.mean_channel_mae);
        let _ = writeln!(s, "mean_corner_value {:.6}", self.mean_corner_value);
        for w in &self.warnings {
            let _ = writeln!(s, "warning {w}");
        }
        for img in &self.per_image {
            let _ = write!(s, "image {} mae {:.6}", img.name, img.channel_mae);
            if let Some(acc) = img.pixel_accuracy {
                let _ = write!(s, " accuracy {acc:.6}");
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ImageSpec;

    fn bw(pixels: Vec<u8>) -> Image {
        Image::from_pixels(ImageSpec::bw(4, 4).unwrap(), pixels).unwrap()
    }

    #[test]
    fn identical_is_perfect() {
        let img = bw(vec![0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0]);
        assert_eq!(pixel_accuracy(&img, &img).unwrap(), 1.0);
        assert_eq!(channel_mae(&img, &img).unwrap(), 0.0);
    }

    #[test]
    fn inverse_right_half_is_zero() {
        let truth = bw(vec![0; 16]);
        let mut px = vec![0; 16];
        for y in 0..4 {
            px[y * 4 + 2] = 1;
            px[y * 4 + 3] = 1;
        }
        assert_eq!(pixel_accuracy(&bw(px), &truth).unwrap(), 0.0);
    }

    #[test]
    fn two_of_eight_wrong() {
        let truth = bw(vec![0; 16]);
        let mut px = vec![0; 16];
        px[2] = 1; // (2, 0)
        px[15] = 1; // (3, 3)
        px[0] = 1; // left half, not counted
        assert_eq!(pixel_accuracy(&bw(px), &truth).unwrap(), 0.75);
    }

    #[test]
    fn accuracy_rejects_rgb_and_mismatch() {
        let rgb = Image::white(ImageSpec::rgb(4, 4).unwrap());
        assert!(matches!(pixel_accuracy(&rgb, &rgb), Err(Error::Encoding(_))));
        let other = Image::white(ImageSpec::bw(2, 4).unwrap());
        assert!(matches!(
            pixel_accuracy(&other, &bw(vec![0; 16])),
            Err(Error::SpecMismatch { .. })
        ));
        assert!(matches!(
            channel_mae(&rgb, &bw(vec![0; 16])),
            Err(Error::SpecMismatch { .. })
        ));
    }

    #[test]
    fn mae_constant_offset() {
        let spec = ImageSpec::rgb(4, 2).unwrap();
        let truth = Image::from_pixels(spec, (0..24).map(|v| v * 3).collect()).unwrap();
        let pred = Image::from_pixels(spec, (0..24).map(|v| v * 3 + 10).collect()).unwrap();
        assert_eq!(channel_mae(&pred, &truth).unwrap(), 10.0);
    }

    #[test]
    fn mae_hand_computed_2x2() {
        // Right half is column 1: pixels (1,0) and (1,1), six channel values.
        let spec = ImageSpec::rgb(2, 2).unwrap();
        let truth = Image::from_pixels(spec, vec![9, 9, 9, 10, 20, 30, 9, 9, 9, 40, 50, 60]).unwrap();
        let pred = Image::from_pixels(spec, vec![0, 0, 0, 13, 20, 25, 0, 0, 0, 40, 59, 61]).unwrap();
        // |3| + |0| + |5| + |0| + |9| + |1| = 18 over 6 values.
        assert_eq!(channel_mae(&pred, &truth).unwrap(), 3.0);
    }

    #[test]
    fn region_means() {
        let spec = ImageSpec::rgb(2, 1).unwrap();
        let img = Image::from_pixels(spec, vec![0, 0, 0, 255, 255, 255]).unwrap();
        assert_eq!(region_mean(&img, Rect::new(0, 0, 2, 1)).unwrap(), vec![127.5; 3]);
        let white = Image::white(ImageSpec::rgb(4, 4).unwrap());
        assert_eq!(region_mean(&white, Rect::new(1, 1, 2, 2)).unwrap(), vec![255.0; 3]);
        assert!(matches!(
            region_mean(&white, Rect::new(3, 0, 2, 1)),
            Err(Error::Bounds(_))
        ));
        assert!(matches!(
            region_mean(&white, Rect::new(0, 0, 0, 1)),
            Err(Error::Bounds(_))
        ));
    }

    #[test]
    fn report_requires_images() {
        assert!(matches!(
            EvalReport::from_scores(vec![], vec![]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn report_aggregates() {
        let truth = bw(vec![0; 16]);
        let mut px = vec![0; 16];
        px[2] = 1;
        px[15] = 1;
        let a = ImageScore::compute("a", &bw(px), &truth).unwrap();
        let b = ImageScore::compute("b", &truth, &truth).unwrap();
        let report = EvalReport::from_scores(vec![a, b], vec![]).unwrap();
        assert_eq!(report.mean_pixel_accuracy, Some(0.875));
        assert!(report.to_text().contains("mean_pixel_accuracy 0.875000"));
    }
}
