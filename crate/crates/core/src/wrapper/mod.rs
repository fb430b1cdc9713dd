//! The wrapper model: one independent learner per label position.
//!
//! Model `i` sees every attribute of the left half and predicts label
//! position `i` of the right half. Models never share fitted state. Each is
//! fitted with seed `mix64(base_seed, i)`, so the result does not depend on
//! how outputs are spread over worker threads.

mod container;

use std::time::Instant;

use rayon::prelude::*;

pub use self::container::{FORMAT_VERSION, MAGIC};

use crate::dataset::{assemble, quantize_labels, Dataset};
use crate::error::{Error, Result};
use crate::image::{Encoding, Image, ImageSpec};
use crate::learners::{self, AttributeMatrix, LearnerConfig, LearnerKind, LearnerModel, Task, TrainingMatrix};
use crate::rng::mix64;

#[derive(Debug, Clone, PartialEq)]
pub struct WrapperModel {
    spec: ImageSpec,
    config: LearnerConfig,
    base_seed: u64,
    models: Vec<LearnerModel>,
}

/// Timing of one [`WrapperModel::fit`] call.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrainReport {
    pub per_output_secs: Vec<f64>,
    pub total_secs: f64,
    pub workers: usize,
    pub outputs_trained: usize,
}

/// Training samples in learner layout: shared attributes plus labels stored
/// column-major so each output's targets are contiguous.
struct TrainingSet {
    x: AttributeMatrix,
    labels: Vec<u8>,
    n: usize,
}

impl TrainingSet {
    fn from_dataset(train: &Dataset) -> Result<Self> {
        let samples: Vec<_> = train.train().collect();
        if samples.is_empty() {
            return Err(Error::InsufficientData("no training samples".into()));
        }
        let n = samples.len();
        let len = train.spec().half_len();
        let rows: Vec<&[u8]> = samples.iter().map(|s| s.attributes.as_slice()).collect();
        let x = AttributeMatrix::from_rows(&rows)?;
        let mut labels = vec![0u8; n * len];
        for (r, s) in samples.iter().enumerate() {
            for (i, &v) in s.labels.iter().enumerate() {
                labels[i * n + r] = v;
            }
        }
        Ok(TrainingSet { x, labels, n })
    }

    fn targets(&self, output: usize) -> Vec<f64> {
        self.labels[output * self.n..(output + 1) * self.n]
            .iter()
            .map(|&v| f64::from(v))
            .collect()
    }
}

impl WrapperModel {
    /// Trains one model per label position of `train`'s train partition on
    /// a pool of `workers` threads.
    pub fn fit(train: &Dataset, config: &LearnerConfig, base_seed: u64, workers: usize) -> Result<(Self, TrainReport)> {
        config.validate()?;
        if workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        let spec = train.spec();
        if spec.encoding == Encoding::Rgb && config.task != Task::Regression {
            return Err(Error::InvalidConfig("colour images need a regression learner".into()));
        }
        let started = Instant::now();
        let set = TrainingSet::from_dataset(train)?;
        if matches!(config.kind, LearnerKind::DecisionTree | LearnerKind::RandomForest) {
            // Build the shared presort once, before the workers race for it.
            set.x.column_index();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        let outputs = spec.half_len();
        let fitted: Vec<(LearnerModel, f64)> = pool.install(|| {
            (0..outputs)
                .into_par_iter()
                .map(|i| {
                    let t0 = Instant::now();
                    let y = set.targets(i);
                    let data = TrainingMatrix::new(&set.x, &y)?;
                    let model = learners::fit(config, data, mix64(base_seed, i as u64))?;
                    Ok((model, t0.elapsed().as_secs_f64()))
                })
                .collect::<Result<_>>()
        })?;
        let (models, per_output_secs): (Vec<_>, Vec<_>) = fitted.into_iter().unzip();
        let report = TrainReport {
            outputs_trained: models.len(),
            per_output_secs,
            total_secs: started.elapsed().as_secs_f64(),
            workers,
        };
        let wm = WrapperModel {
            spec,
            config: *config,
            base_seed,
            models,
        };
        Ok((wm, report))
    }

    /// Assembles a wrapper from already fitted models.
    pub fn from_parts(
        spec: ImageSpec,
        config: LearnerConfig,
        base_seed: u64,
        models: Vec<LearnerModel>,
    ) -> Result<Self> {
        spec.validate()?;
        if models.len() != spec.half_len() {
            return Err(Error::Shape {
                expected: spec.half_len(),
                got: models.len(),
            });
        }
        if let Some(m) = models.iter().find(|m| m.n_features() != spec.half_len()) {
            return Err(Error::Shape {
                expected: spec.half_len(),
                got: m.n_features(),
            });
        }
        Ok(WrapperModel {
            spec,
            config,
            base_seed,
            models,
        })
    }

    pub fn spec(&self) -> ImageSpec {
        self.spec
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn models(&self) -> &[LearnerModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Element `i` is model `i`'s prediction for `attributes`.
    pub fn predict(&self, attributes: &[u8]) -> Result<Vec<f64>> {
        let d = self.spec.half_len();
        if attributes.len() != d {
            return Err(Error::Shape {
                expected: d,
                got: attributes.len(),
            });
        }
        Ok(self.models.iter().map(|m| m.predict_unchecked(attributes)).collect())
    }

    /// Left half copied from `left`, right half predicted.
    pub fn complete(&self, left: &Image) -> Result<Image> {
        if left.spec() != self.spec.half() {
            return Err(Error::SpecMismatch {
                expected: self.spec.half().to_string(),
                found: left.spec().to_string(),
            });
        }
        // A half image's row-major pixels are exactly the attribute vector.
        let predicted = self.predict(left.pixels())?;
        let labels = quantize_labels(self.spec.encoding, &predicted)?;
        assemble(self.spec, left, &labels)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        container::encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        container::decode(bytes)
    }
}

/// Trains a wrapper model; see [`WrapperModel::fit`].
pub fn wm_fit(
    train: &Dataset,
    config: &LearnerConfig,
    base_seed: u64,
    workers: usize,
) -> Result<(WrapperModel, TrainReport)> {
    WrapperModel::fit(train, config, base_seed, workers)
}

pub fn wm_predict(wm: &WrapperModel, attributes: &[u8]) -> Result<Vec<f64>> {
    wm.predict(attributes)
}

pub fn wm_complete(wm: &WrapperModel, left: &Image) -> Result<Image> {
    wm.complete(left)
}

pub fn wm_save(wm: &WrapperModel) -> Vec<u8> {
    wm.to_bytes()
}

pub fn wm_load(bytes: &[u8]) -> Result<WrapperModel> {
    WrapperModel::from_bytes(bytes)
}
