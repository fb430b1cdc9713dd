//! Synthetic image families.
//!
//! Each generator is a pure function of its parameters and a 64-bit
//! per-image seed. [`GeneratorConfig::generate`] derives that seed from a
//! run's base [`Seed`] and the image index with [`mix64`](crate::rng::mix64).
//!
//! Draw order is part of the contract, since it fixes which images a seed
//! produces:
//!
//! * lines: one `below(extent)` per line;
//! * circles: per disk, `next_f64` for x then for y;
//! * triangles: `(x, y)` for two left-half vertices then the right-half
//!   vertex, then `R, G, B` via `below(256)` for the coloured variant.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Encoding, Image, ImageSpec};
use crate::rng::{Pcg32, Seed};

const BLACK: [u8; 1] = [1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    HorizontalLines,
    VerticalLines,
    Circles,
    TriangleBw,
    TriangleColor,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::HorizontalLines,
        Family::VerticalLines,
        Family::Circles,
        Family::TriangleBw,
        Family::TriangleColor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::HorizontalLines => "horizontal",
            Family::VerticalLines => "vertical",
            Family::Circles => "circles",
            Family::TriangleBw => "triangle",
            Family::TriangleColor => "triangle_color",
        }
    }

    pub fn encoding(self) -> Encoding {
        match self {
            Family::TriangleColor => Encoding::Rgb,
            _ => Encoding::Bw,
        }
    }

    pub fn default_spec(self) -> ImageSpec {
        match self.encoding() {
            Encoding::Bw => ImageSpec::BW_DEFAULT,
            Encoding::Rgb => ImageSpec::RGB_DEFAULT,
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "horizontal" | "horizontal_lines" => Ok(Family::HorizontalLines),
            "vertical" | "vertical_lines" => Ok(Family::VerticalLines),
            "circles" | "circle" => Ok(Family::Circles),
            "triangle" | "triangle_bw" => Ok(Family::TriangleBw),
            "triangle_color" | "triangle_colour" => Ok(Family::TriangleColor),
            other => Err(Error::InvalidConfig(format!("unknown family `{other}`"))),
        }
    }
}

/// Parameters for one synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub family: Family,
    /// Lines or disks per image; ignored by triangles.
    pub count: u32,
    /// Disk diameter in pixels; only read for circles.
    pub diameter: f64,
    pub spec: ImageSpec,
}

impl GeneratorConfig {
    /// Defaults: 50 shapes, 15 px disks, 250x250 BW or 200x200 RGB.
    pub fn new(family: Family) -> Self {
        GeneratorConfig {
            family,
            count: 50,
            diameter: 15.0,
            spec: family.default_spec(),
        }
    }

    pub fn with_spec(mut self, spec: ImageSpec) -> Self {
        self.spec = spec;
        self
    }

    pub fn with_count(mut self, count: u32) -> Self {
        self.count = count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.spec.encoding != self.family.encoding() {
            return Err(Error::InvalidConfig(format!(
                "family {} needs {} images, got {}",
                self.family.name(),
                self.family.encoding().name(),
                self.spec.encoding.name()
            )));
        }
        if self.family == Family::Circles && (self.diameter <= 0.0 || self.diameter.is_nan()) {
            return Err(Error::InvalidConfig(format!(
                "circle diameter must be positive, got {}",
                self.diameter
            )));
        }
        Ok(())
    }

    /// Image number `index` of the corpus seeded by `base`.
    pub fn generate(&self, base: Seed, index: u64) -> Result<Image> {
        self.validate()?;
        let seed = base.derive(index);
        match self.family {
            Family::HorizontalLines => gen_lines(Orientation::Horizontal, self.count, self.spec, seed),
            Family::VerticalLines => gen_lines(Orientation::Vertical, self.count, self.spec, seed),
            Family::Circles => gen_circles(self.count, self.diameter, self.spec, seed),
            Family::TriangleBw => gen_triangle(self.spec, false, seed),
            Family::TriangleColor => gen_triangle(self.spec, true, seed),
        }
    }
}

fn require(spec: ImageSpec, encoding: Encoding) -> Result<()> {
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::InvalidSpec(format!("zero-sized image {spec}")));
    }
    if spec.encoding != encoding {
        return Err(Error::InvalidConfig(format!(
            "generator needs a {} spec, got {spec}",
            encoding.name()
        )));
    }
    Ok(())
}

/// White canvas with `count` one-pixel black lines at uniformly drawn
/// positions (with replacement).
pub fn gen_lines(orientation: Orientation, count: u32, spec: ImageSpec, seed: u64) -> Result<Image> {
    require(spec, Encoding::Bw)?;
    let mut rng = Pcg32::from_seed(seed);
    let mut img = Image::white(spec);
    for _ in 0..count {
        match orientation {
            Orientation::Horizontal => {
                let y = rng.below(spec.height);
                for x in 0..spec.width {
                    img.set_pixel(x, y, &BLACK);
                }
            }
            Orientation::Vertical => {
                let x = rng.below(spec.width);
                for y in 0..spec.height {
                    img.set_pixel(x, y, &BLACK);
                }
            }
        }
    }
    Ok(img)
}

/// Disk in continuous pixel coordinates; pixel `(x, y)` has its centre at
/// `(x + 0.5, y + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

impl Disk {
    pub fn covers(&self, x: u32, y: u32) -> bool {
        let dx = f64::from(x) + 0.5 - self.cx;
        let dy = f64::from(y) + 0.5 - self.cy;
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Centres uniform on `[-d, extent + d)` per axis, so a disk may hang off an
/// edge by up to its diameter.
pub fn sample_disks(count: u32, diameter: f64, spec: ImageSpec, rng: &mut Pcg32) -> Vec<Disk> {
    let span_x = f64::from(spec.width) + 2.0 * diameter;
    let span_y = f64::from(spec.height) + 2.0 * diameter;
    (0..count)
        .map(|_| {
            let cx = -diameter + rng.next_f64() * span_x;
            let cy = -diameter + rng.next_f64() * span_y;
            Disk {
                cx,
                cy,
                radius: diameter / 2.0,
            }
        })
        .collect()
}

/// Paints every pixel whose centre is within the disk radius.
pub fn fill_disk(img: &mut Image, disk: &Disk, value: &[u8]) {
    let (w, h) = (i64::from(img.width()), i64::from(img.height()));
    let x0 = ((disk.cx - disk.radius).floor() as i64 - 1).max(0);
    let x1 = ((disk.cx + disk.radius).ceil() as i64 + 1).min(w - 1);
    let y0 = ((disk.cy - disk.radius).floor() as i64 - 1).max(0);
    let y1 = ((disk.cy + disk.radius).ceil() as i64 + 1).min(h - 1);
    for y in y0..=y1 {
        for x in x0..=x1 {
            if disk.covers(x as u32, y as u32) {
                img.set_pixel(x as u32, y as u32, value);
            }
        }
    }
}

/// White canvas with `count` filled black disks of the given diameter.
pub fn gen_circles(count: u32, diameter: f64, spec: ImageSpec, seed: u64) -> Result<Image> {
    require(spec, Encoding::Bw)?;
    if diameter <= 0.0 || diameter.is_nan() {
        return Err(Error::InvalidConfig(format!(
            "circle diameter must be positive, got {diameter}"
        )));
    }
    let mut rng = Pcg32::from_seed(seed);
    let mut img = Image::white(spec);
    for disk in sample_disks(count, diameter, spec, &mut rng) {
        fill_disk(&mut img, &disk, &BLACK);
    }
    Ok(img)
}

/// Triangle vertices on pixel centres, as `(x, y)` pixel indices.
pub type Vertex = (i64, i64);

/// The three vertices and fill drawn for one triangle image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleDraw {
    pub vertices: [Vertex; 3],
    pub fill: [u8; 3],
}

/// Two vertices over left-half pixels, one over right-half pixels, then the
/// fill colour (black for BW).
pub fn sample_triangle(spec: ImageSpec, colored: bool, rng: &mut Pcg32) -> TriangleDraw {
    let half = (spec.width / 2).max(1);
    let mut left = || (i64::from(rng.below(half)), i64::from(rng.below(spec.height)));
    let a = left();
    let b = left();
    let c = (
        i64::from(spec.width / 2 + rng.below(spec.width - spec.width / 2)),
        i64::from(rng.below(spec.height)),
    );
    let fill = if colored {
        [rng.below(256) as u8, rng.below(256) as u8, rng.below(256) as u8]
    } else {
        [1, 1, 1]
    };
    TriangleDraw {
        vertices: [a, b, c],
        fill,
    }
}

/// White canvas with one filled triangle.
pub fn gen_triangle(spec: ImageSpec, colored: bool, seed: u64) -> Result<Image> {
    require(spec, if colored { Encoding::Rgb } else { Encoding::Bw })?;
    let mut rng = Pcg32::from_seed(seed);
    let draw = sample_triangle(spec, colored, &mut rng);
    let mut img = Image::white(spec);
    fill_triangle(&mut img, draw.vertices, &draw.fill);
    Ok(img)
}

fn cross(o: Vertex, a: Vertex, b: Vertex) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Scanline fill over pixel centres with a top-left tie rule: a centre
/// exactly on an edge is filled only when that edge is a top or left edge.
/// Zero-area triangles fall back to a Bresenham segment between the two
/// farthest vertices.
pub fn fill_triangle(img: &mut Image, vertices: [Vertex; 3], value: &[u8]) {
    let [a, mut b, mut c] = vertices;
    let area2 = cross(a, b, c);
    if area2 == 0 {
        let pairs = [(a, b), (b, c), (a, c)];
        let dist = |(p, q): (Vertex, Vertex)| (p.0 - q.0).pow(2) + (p.1 - q.1).pow(2);
        let (p, q) = pairs
            .into_iter()
            .fold(pairs[0], |best, pair| if dist(pair) > dist(best) { pair } else { best });
        draw_segment(img, p, q, value);
        return;
    }
    if area2 < 0 {
        std::mem::swap(&mut b, &mut c);
    }
    let edges = [(a, b), (b, c), (c, a)];
    let w = i64::from(img.width());
    let h = i64::from(img.height());
    let y_lo = a.1.min(b.1).min(c.1).max(0);
    let y_hi = a.1.max(b.1).max(c.1).min(h - 1);
    for y in y_lo..=y_hi {
        let mut x_lo = 0i64;
        let mut x_hi = w - 1;
        for &(p, q) in &edges {
            let (dx, dy) = (q.0 - p.0, q.1 - p.1);
            let bias = if (dy == 0 && dx > 0) || dy < 0 { 0 } else { 1 };
            // Edge value along the row: coef * x + k, must be >= bias.
            let coef = -dy;
            let k = dx * (y - p.1) + dy * p.0;
            let need = bias - k;
            match coef.cmp(&0) {
                std::cmp::Ordering::Greater => x_lo = x_lo.max(ceil_div(need, coef)),
                std::cmp::Ordering::Less => x_hi = x_hi.min(floor_div(-need, -coef)),
                std::cmp::Ordering::Equal => {
                    if k < bias {
                        x_hi = -1;
                    }
                }
            }
        }
        for x in x_lo..=x_hi {
            img.set_pixel(x as u32, y as u32, value);
        }
    }
}

fn floor_div(p: i64, q: i64) -> i64 {
    p.div_euclid(q)
}

fn ceil_div(p: i64, q: i64) -> i64 {
    -(-p).div_euclid(q)
}

fn draw_segment(img: &mut Image, from: Vertex, to: Vertex, value: &[u8]) {
    let (w, h) = (i64::from(img.width()), i64::from(img.height()));
    let (mut x, mut y) = from;
    let dx = (to.0 - x).abs();
    let dy = -(to.1 - y).abs();
    let sx = if x < to.0 { 1 } else { -1 };
    let sy = if y < to.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if (0..w).contains(&x) && (0..h).contains(&y) {
            img.set_pixel(x as u32, y as u32, value);
        }
        if (x, y) == to {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}
