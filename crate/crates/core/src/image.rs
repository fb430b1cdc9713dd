use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pixel encoding of an [`Image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Encoding {
    /// One value per pixel: 0 = white, 1 = black.
    Bw,
    /// Three 8-bit channels per pixel, R then G then B.
    Rgb,
}

impl Encoding {
    pub fn channels(self) -> usize {
        match self {
            Encoding::Bw => 1,
            Encoding::Rgb => 3,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Encoding::Bw => 0,
            Encoding::Rgb => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Encoding::Bw),
            1 => Some(Encoding::Rgb),
            _ => None,
        }
    }

    /// Largest legal stored value.
    pub fn max_value(self) -> u8 {
        match self {
            Encoding::Bw => 1,
            Encoding::Rgb => 255,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Bw => "bw",
            Encoding::Rgb => "rgb",
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bw" | "b&w" | "binary" => Ok(Encoding::Bw),
            "rgb" | "color" | "colour" => Ok(Encoding::Rgb),
            other => Err(Error::InvalidConfig(format!("unknown encoding `{other}`"))),
        }
    }
}

/// Raster dimensions plus encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageSpec {
    pub width: u32,
    pub height: u32,
    pub encoding: Encoding,
}

impl ImageSpec {
    pub const BW_DEFAULT: ImageSpec = ImageSpec {
        width: 250,
        height: 250,
        encoding: Encoding::Bw,
    };
    pub const RGB_DEFAULT: ImageSpec = ImageSpec {
        width: 200,
        height: 200,
        encoding: Encoding::Rgb,
    };

    /// Validated constructor: both sides positive, width even.
    pub fn new(width: u32, height: u32, encoding: Encoding) -> Result<Self> {
        let spec = ImageSpec {
            width,
            height,
            encoding,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bw(width: u32, height: u32) -> Result<Self> {
        Self::new(width, height, Encoding::Bw)
    }

    pub fn rgb(width: u32, height: u32) -> Result<Self> {
        Self::new(width, height, Encoding::Rgb)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidSpec(format!("zero-sized image {self}")));
        }
        if !self.width.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!("width of {self} is odd")));
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Stored values in a full image.
    pub fn value_count(&self) -> usize {
        self.pixel_count() * self.encoding.channels()
    }

    /// Values in one half: `w*h/2` (BW) or `3*w*h/2` (RGB).
    pub fn half_len(&self) -> usize {
        self.value_count() / 2
    }

    /// Spec of the left (or right) half.
    pub fn half(&self) -> ImageSpec {
        ImageSpec {
            width: self.width / 2,
            ..*self
        }
    }
}

impl fmt::Display for ImageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} {}", self.width, self.height, self.encoding.name())
    }
}

/// Row-major raster. `pixels` holds `channels` bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Image {
    spec: ImageSpec,
    pixels: Vec<u8>,
}

impl Image {
    /// All-white canvas. Only requires positive dimensions, so half-width
    /// images with an odd width are allowed.
    pub fn white(spec: ImageSpec) -> Self {
        let fill = match spec.encoding {
            Encoding::Bw => 0,
            Encoding::Rgb => 255,
        };
        Image {
            spec,
            pixels: vec![fill; spec.value_count()],
        }
    }

    pub fn from_pixels(spec: ImageSpec, pixels: Vec<u8>) -> Result<Self> {
        if spec.width == 0 || spec.height == 0 {
            return Err(Error::InvalidSpec(format!("zero-sized image {spec}")));
        }
        if pixels.len() != spec.value_count() {
            return Err(Error::Shape {
                expected: spec.value_count(),
                got: pixels.len(),
            });
        }
        let max = spec.encoding.max_value();
        if let Some((index, &v)) = pixels.iter().enumerate().find(|(_, &v)| v > max) {
            return Err(Error::Range {
                index,
                value: f64::from(v),
                range: "{0,1}",
            });
        }
        Ok(Image { spec, pixels })
    }

    pub fn spec(&self) -> ImageSpec {
        self.spec
    }

    pub fn width(&self) -> u32 {
        self.spec.width
    }

    pub fn height(&self) -> u32 {
        self.spec.height
    }

    pub fn encoding(&self) -> Encoding {
        self.spec.encoding
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.spec.width && y < self.spec.height);
        (y as usize * self.spec.width as usize + x as usize) * self.spec.encoding.channels()
    }

    /// Channel values of pixel `(x, y)`.
    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let o = self.offset(x, y);
        &self.pixels[o..o + self.spec.encoding.channels()]
    }

    /// Writes `value` (one entry per channel) into pixel `(x, y)`.
    pub fn set_pixel(&mut self, x: u32, y: u32, value: &[u8]) {
        let o = self.offset(x, y);
        let c = self.spec.encoding.channels();
        self.pixels[o..o + c].copy_from_slice(&value[..c]);
    }

    /// Black pixel count of a BW image (0 for RGB).
    pub fn black_count(&self) -> usize {
        match self.spec.encoding {
            Encoding::Bw => self.pixels.iter().filter(|&&v| v == 1).count(),
            Encoding::Rgb => 0,
        }
    }

    /// SHA-256 over the dimensions, encoding and pixel bytes, hex encoded.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.spec.width.to_le_bytes());
        h.update(self.spec.height.to_le_bytes());
        h.update([self.spec.encoding.tag()]);
        h.update(&self.pixels);
        hex::encode(h.finalize())
    }
}
