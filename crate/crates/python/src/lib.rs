//! Python bindings for the `shallow-art` core.
//!
//! Images cross the boundary as raw pixel bytes (BW: one byte per pixel,
//! 0 = white, 1 = black; RGB: three bytes per pixel), row-major.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use shallow_art as core;
use shallow_art::dataset;
use shallow_art::metrics;
use shallow_art::{Encoding, Family, GeneratorConfig, ImageSpec, LearnerConfig, LearnerKind, Seed, Task};

create_exception!(
    shallow_art_py,
    ShallowArtError,
    PyValueError,
    "Raised for invalid shallow-art inputs."
);

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => ShallowArtError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

fn spec(width: u32, height: u32, encoding: &str) -> PyResult<ImageSpec> {
    ImageSpec::new(width, height, parse(encoding)?).map_err(to_py)
}

#[pyclass(name = "Image", module = "shallow_art_py", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyImage {
    inner: core::Image,
}

impl From<core::Image> for PyImage {
    fn from(inner: core::Image) -> Self {
        PyImage { inner }
    }
}

#[pymethods]
impl PyImage {
    /// All-white image.
    #[staticmethod]
    #[pyo3(signature = (width, height, encoding = "bw"))]
    fn white(width: u32, height: u32, encoding: &str) -> PyResult<Self> {
        let spec = ImageSpec {
            width,
            height,
            encoding: parse(encoding)?,
        };
        if width == 0 || height == 0 {
            return Err(ShallowArtError::new_err("image dimensions must be non-zero"));
        }
        Ok(core::Image::white(spec).into())
    }

    #[staticmethod]
    #[pyo3(signature = (width, height, pixels, encoding = "bw"))]
    fn from_pixels(width: u32, height: u32, pixels: Vec<u8>, encoding: &str) -> PyResult<Self> {
        let spec = ImageSpec {
            width,
            height,
            encoding: parse(encoding)?,
        };
        core::Image::from_pixels(spec, pixels).map(Into::into).map_err(to_py)
    }

    /// Decodes PNG or JPEG bytes; BW decoding thresholds luminance at 128.
    #[staticmethod]
    #[pyo3(signature = (data, encoding = "bw"))]
    fn decode(data: &[u8], encoding: &str) -> PyResult<Self> {
        dataset::decode_any(data, parse(encoding)?)
            .map(Into::into)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (path, encoding = "bw"))]
    fn load(path: PathBuf, encoding: &str) -> PyResult<Self> {
        dataset::read_image_file(&path, parse(encoding)?)
            .map(Into::into)
            .map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        dataset::write_image_file(&path, &self.inner).map_err(to_py)
    }

    fn to_png<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let bytes = dataset::save_image(&self.inner).map_err(to_py)?;
        Ok(PyBytes::new(py, &bytes))
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    #[getter]
    fn encoding(&self) -> &'static str {
        self.inner.encoding().name()
    }

    fn pixels<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.inner.pixels())
    }

    fn pixel(&self, x: u32, y: u32) -> PyResult<Vec<u8>> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(ShallowArtError::new_err(format!("pixel ({x}, {y}) out of bounds")));
        }
        Ok(self.inner.pixel(x, y).to_vec())
    }

    fn black_count(&self) -> usize {
        self.inner.black_count()
    }

    fn content_hash(&self) -> String {
        self.inner.content_hash()
    }

    fn __repr__(&self) -> String {
        format!("Image({})", self.inner.spec())
    }
}

/// Draws image `index` of a synthetic corpus.
#[pyfunction]
#[pyo3(signature = (family, index = 0, seed = 0, shapes = None, diameter = None, width = None, height = None))]
fn generate(
    family: &str,
    index: u64,
    seed: u64,
    shapes: Option<u32>,
    diameter: Option<f64>,
    width: Option<u32>,
    height: Option<u32>,
) -> PyResult<PyImage> {
    let family: Family = parse(family)?;
    let mut cfg = GeneratorConfig::new(family);
    if width.is_some() || height.is_some() {
        let d = family.default_spec();
        cfg.spec = ImageSpec::new(width.unwrap_or(d.width), height.unwrap_or(d.height), d.encoding).map_err(to_py)?;
    }
    if let Some(n) = shapes {
        cfg.count = n;
    }
    if let Some(d) = diameter {
        cfg.diameter = d;
    }
    cfg.generate(Seed(seed), index).map(Into::into).map_err(to_py)
}

/// `(attributes, labels)` as bytes: left-half values and right-half values.
#[pyfunction]
fn flatten_split<'py>(py: Python<'py>, image: &PyImage) -> PyResult<(Bound<'py, PyBytes>, Bound<'py, PyBytes>)> {
    let s = core::flatten_split(&image.inner).map_err(to_py)?;
    Ok((PyBytes::new(py, &s.attributes), PyBytes::new(py, &s.labels)))
}

#[pyfunction]
fn left_half(image: &PyImage) -> PyResult<PyImage> {
    core::left_half(&image.inner).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (width, height, left, labels, encoding = "bw"))]
fn assemble(width: u32, height: u32, left: &PyImage, labels: Vec<u8>, encoding: &str) -> PyResult<PyImage> {
    core::assemble(spec(width, height, encoding)?, &left.inner, &labels)
        .map(Into::into)
        .map_err(to_py)
}

/// Deduplicates, converts and resizes a list of images.
#[pyfunction]
#[pyo3(signature = (images, width, height, encoding = "rgb"))]
fn preprocess_corpus(images: Vec<PyImage>, width: u32, height: u32, encoding: &str) -> PyResult<Vec<PyImage>> {
    let raw: Vec<core::Image> = images.into_iter().map(|i| i.inner).collect();
    Ok(dataset::preprocess_corpus(&raw, spec(width, height, encoding)?)
        .into_iter()
        .map(Into::into)
        .collect())
}

#[pyfunction]
fn pixel_accuracy(pred: &PyImage, truth: &PyImage) -> PyResult<f64> {
    metrics::pixel_accuracy(&pred.inner, &truth.inner).map_err(to_py)
}

#[pyfunction]
fn channel_mae(pred: &PyImage, truth: &PyImage) -> PyResult<f64> {
    metrics::channel_mae(&pred.inner, &truth.inner).map_err(to_py)
}

#[pyfunction]
fn region_mean(image: &PyImage, x: u32, y: u32, width: u32, height: u32) -> PyResult<Vec<f64>> {
    metrics::region_mean(&image.inner, metrics::Rect::new(x, y, width, height)).map_err(to_py)
}

#[pyclass(name = "WrapperModel", module = "shallow_art_py", frozen)]
pub struct PyWrapperModel {
    inner: core::WrapperModel,
    report: Option<core::TrainReport>,
}

#[pymethods]
impl PyWrapperModel {
    /// Trains one model per right-half value on `images`, which must all
    /// share one size and encoding.
    #[staticmethod]
    #[pyo3(signature = (images, learner = "tree", task = None, seed = 0, workers = 1, trees = 10, epochs = 5, lam = 1e-4, max_depth = None))]
    #[allow(clippy::too_many_arguments)]
    fn fit(
        py: Python<'_>,
        images: Vec<PyImage>,
        learner: &str,
        task: Option<&str>,
        seed: u64,
        workers: usize,
        trees: u32,
        epochs: u32,
        lam: f64,
        max_depth: Option<u32>,
    ) -> PyResult<Self> {
        let first = images
            .first()
            .ok_or_else(|| to_py(core::Error::InsufficientData("no training images".into())))?;
        let spec = first.inner.spec();
        let task = match task {
            Some(t) => parse(t)?,
            None if spec.encoding == Encoding::Rgb => Task::Regression,
            None => Task::Classification,
        };
        let config = LearnerConfig {
            kind: parse::<LearnerKind>(learner)?,
            task,
            max_depth,
            n_trees: trees,
            epochs,
            lambda: lam,
        };
        let raw: Vec<core::Image> = images.into_iter().map(|i| i.inner).collect();
        let (inner, report) = py
            .detach(|| {
                let ds = core::Dataset::from_train_images(spec, &raw)?;
                core::WrapperModel::fit(&ds, &config, seed, workers)
            })
            .map_err(to_py)?;
        Ok(PyWrapperModel {
            inner,
            report: Some(report),
        })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        let inner = core::WrapperModel::from_bytes(data).map_err(to_py)?;
        Ok(PyWrapperModel { inner, report: None })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path).map_err(|e| to_py(e.into()))?;
        Self::from_bytes(&bytes)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.to_bytes())
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(&path, self.inner.to_bytes()).map_err(|e| to_py(e.into()))
    }

    /// Element `i` is model `i`'s prediction for the attribute vector.
    fn predict(&self, attributes: Vec<u8>) -> PyResult<Vec<f64>> {
        self.inner.predict(&attributes).map_err(to_py)
    }

    /// Left half kept, right half predicted.
    fn complete(&self, py: Python<'_>, left: &PyImage) -> PyResult<PyImage> {
        let left = left.inner.clone();
        py.detach(|| self.inner.complete(&left)).map(Into::into).map_err(to_py)
    }

    /// Timing of the fit that produced this model; `None` after loading.
    fn train_report<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        let Some(r) = &self.report else {
            return Ok(None);
        };
        let d = PyDict::new(py);
        d.set_item("total_secs", r.total_secs)?;
        d.set_item("workers", r.workers)?;
        d.set_item("outputs_trained", r.outputs_trained)?;
        d.set_item("per_output_secs", r.per_output_secs.clone())?;
        Ok(Some(d))
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.spec().width
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.spec().height
    }

    #[getter]
    fn encoding(&self) -> &'static str {
        self.inner.spec().encoding.name()
    }

    #[getter]
    fn learner(&self) -> &'static str {
        self.inner.config().kind.name()
    }

    #[getter]
    fn base_seed(&self) -> u64 {
        self.inner.base_seed()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "WrapperModel({}, {} x {})",
            self.inner.spec(),
            self.inner.len(),
            self.inner.config().kind
        )
    }
}

#[pymodule]
fn shallow_art_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ShallowArtError", m.py().get_type::<ShallowArtError>())?;
    m.add_class::<PyImage>()?;
    m.add_class::<PyWrapperModel>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(flatten_split, m)?)?;
    m.add_function(wrap_pyfunction!(left_half, m)?)?;
    m.add_function(wrap_pyfunction!(assemble, m)?)?;
    m.add_function(wrap_pyfunction!(preprocess_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(pixel_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(channel_mae, m)?)?;
    m.add_function(wrap_pyfunction!(region_mean, m)?)?;
    m.add("FAMILIES", Family::ALL.map(Family::name).to_vec())?;
    Ok(())
}
