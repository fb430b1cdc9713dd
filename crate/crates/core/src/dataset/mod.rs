//! Attribute/label encoding, datasets and image I/O.
//!
//! An image of width `w` is split at column `w / 2`. The left half,
//! flattened row by row (channels R, G, B innermost for colour images),
//! is the attribute vector; the right half flattened the same way is the
//! label vector. Label position `i` therefore always names the same pixel
//! channel, which is what lets the wrapper keep one model per position.

mod corpus;
mod io;

use std::collections::HashSet;

pub use self::corpus::{preprocess_corpus, resize_bilinear};
pub use self::io::{decode_any, load_image, read_image_file, save_image, write_image_file};

use crate::error::{Error, Result};
use crate::image::{Encoding, Image, ImageSpec};

/// One image as (left-half attributes, right-half labels).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlatSample {
    pub attributes: Vec<u8>,
    pub labels: Vec<u8>,
}

fn copy_columns(img: &Image, from: u32, to: u32, out: &mut Vec<u8>) {
    let c = img.encoding().channels();
    let row = img.width() as usize * c;
    let (a, b) = (from as usize * c, to as usize * c);
    for chunk in img.pixels().chunks_exact(row) {
        out.extend_from_slice(&chunk[a..b]);
    }
}

/// Splits `img` into left-half attributes and right-half labels.
pub fn flatten_split(img: &Image) -> Result<FlatSample> {
    img.spec().validate()?;
    let half = img.width() / 2;
    let n = img.spec().half_len();
    let mut attributes = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    copy_columns(img, 0, half, &mut attributes);
    copy_columns(img, half, img.width(), &mut labels);
    Ok(FlatSample { attributes, labels })
}

/// Columns `[0, w/2)` of `img` as a half-width image.
pub fn left_half(img: &Image) -> Result<Image> {
    img.spec().validate()?;
    let mut pixels = Vec::with_capacity(img.spec().half_len());
    copy_columns(img, 0, img.width() / 2, &mut pixels);
    Image::from_pixels(img.spec().half(), pixels)
}

/// Inverse of [`flatten_split`]: `left` supplies columns `[0, w/2)`, and
/// `labels` is un-flattened into columns `[w/2, w)`.
pub fn assemble(spec: ImageSpec, left: &Image, labels: &[u8]) -> Result<Image> {
    spec.validate()?;
    if left.spec() != spec.half() {
        return Err(Error::SpecMismatch {
            expected: spec.half().to_string(),
            found: left.spec().to_string(),
        });
    }
    if labels.len() != spec.half_len() {
        return Err(Error::Shape {
            expected: spec.half_len(),
            got: labels.len(),
        });
    }
    let max = spec.encoding.max_value();
    if let Some((index, &v)) = labels.iter().enumerate().find(|(_, &v)| v > max) {
        return Err(Error::Range {
            index,
            value: f64::from(v),
            range: "{0,1}",
        });
    }
    let half_row = left.width() as usize * spec.encoding.channels();
    let mut pixels = Vec::with_capacity(spec.value_count());
    for (l, r) in left.pixels().chunks_exact(half_row).zip(labels.chunks_exact(half_row)) {
        pixels.extend_from_slice(l);
        pixels.extend_from_slice(r);
    }
    Image::from_pixels(spec, pixels)
}

/// Rounds real-valued predictions to stored pixel values.
///
/// Values must already lie in the encoding's range (`[0, 1]` for BW,
/// `[0, 255]` for RGB); NaN or anything outside is a range error.
pub fn quantize_labels(encoding: Encoding, values: &[f64]) -> Result<Vec<u8>> {
    let max = f64::from(encoding.max_value());
    values
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            if v.is_nan() || !(0.0..=max).contains(&v) {
                Err(Error::Range {
                    index,
                    value: v,
                    range: match encoding {
                        Encoding::Bw => "[0,1]",
                        Encoding::Rgb => "[0,255]",
                    },
                })
            } else {
                Ok(v.round() as u8)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Partition {
    Train,
    Test,
}

impl Partition {
    fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Test => "test",
        }
    }
}

/// Flattened samples sharing one spec, each tagged train or test.
///
/// An image's content may appear in at most one partition.
#[derive(Debug, Clone)]
pub struct Dataset {
    spec: ImageSpec,
    samples: Vec<FlatSample>,
    partition: Vec<Partition>,
    train_hashes: HashSet<String>,
    test_hashes: HashSet<String>,
}

impl Dataset {
    pub fn new(spec: ImageSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Dataset {
            spec,
            samples: Vec::new(),
            partition: Vec::new(),
            train_hashes: HashSet::new(),
            test_hashes: HashSet::new(),
        })
    }

    /// Builds a dataset with every image in the train partition.
    pub fn from_train_images<'a, I>(spec: ImageSpec, images: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Image>,
    {
        let mut ds = Dataset::new(spec)?;
        for img in images {
            ds.push(img, Partition::Train)?;
        }
        Ok(ds)
    }

    /// Adds an image. Rejects spec mismatches and content already present
    /// in the other partition.
    pub fn push(&mut self, img: &Image, partition: Partition) -> Result<()> {
        if img.spec() != self.spec {
            return Err(Error::SpecMismatch {
                expected: self.spec.to_string(),
                found: img.spec().to_string(),
            });
        }
        let hash = img.content_hash();
        let (own, other, other_name) = match partition {
            Partition::Train => (&mut self.train_hashes, &self.test_hashes, Partition::Test.name()),
            Partition::Test => (&mut self.test_hashes, &self.train_hashes, Partition::Train.name()),
        };
        if other.contains(&hash) {
            return Err(Error::PartitionOverlap(other_name));
        }
        own.insert(hash);
        self.samples.push(flatten_split(img)?);
        self.partition.push(partition);
        Ok(())
    }

    /// Adds an already flattened sample (no overlap check is possible).
    pub fn push_sample(&mut self, sample: FlatSample, partition: Partition) -> Result<()> {
        let n = self.spec.half_len();
        for len in [sample.attributes.len(), sample.labels.len()] {
            if len != n {
                return Err(Error::Shape { expected: n, got: len });
            }
        }
        self.samples.push(sample);
        self.partition.push(partition);
        Ok(())
    }

    pub fn spec(&self) -> ImageSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (&FlatSample, Partition)> {
        self.samples.iter().zip(self.partition.iter().copied())
    }

    pub fn partition(&self, which: Partition) -> impl Iterator<Item = &FlatSample> {
        self.samples().filter(move |(_, p)| *p == which).map(|(s, _)| s)
    }

    pub fn train(&self) -> impl Iterator<Item = &FlatSample> {
        self.partition(Partition::Train)
    }

    pub fn test(&self) -> impl Iterator<Item = &FlatSample> {
        self.partition(Partition::Test)
    }
}
