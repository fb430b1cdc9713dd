//! Single-output learners behind one `fit` / `predict` pair.
//!
//! Defaults (no tuning is performed):
//!
//! | learner        | setting                                            |
//! |----------------|----------------------------------------------------|
//! | decision tree  | unlimited depth, Gini / variance, midpoint splits  |
//! | random forest  | 10 trees, bootstrap, `floor(sqrt(d))` features     |
//! | perceptron     | rate 1, 5 epochs, stored order                     |
//! | linear SVM     | Pegasos, lambda 1e-4, 5 epochs, seeded shuffling   |

pub mod forest;
pub mod linear;
pub mod matrix;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use self::forest::Forest;
pub use self::linear::LinearModel;
pub use self::matrix::{AttributeMatrix, TrainingMatrix};
pub use self::tree::{Node, Tree};

use self::tree::GrowParams;
use crate::error::{Error, Result};
use crate::rng::Pcg32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearnerKind {
    DecisionTree,
    RandomForest,
    Perceptron,
    LinearSvm,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::DecisionTree,
        LearnerKind::RandomForest,
        LearnerKind::Perceptron,
        LearnerKind::LinearSvm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::DecisionTree => "tree",
            LearnerKind::RandomForest => "forest",
            LearnerKind::Perceptron => "perceptron",
            LearnerKind::LinearSvm => "svm",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            LearnerKind::DecisionTree => 0,
            LearnerKind::RandomForest => 1,
            LearnerKind::Perceptron => 2,
            LearnerKind::LinearSvm => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "tree" | "decision_tree" => Ok(LearnerKind::DecisionTree),
            "forest" | "random_forest" => Ok(LearnerKind::RandomForest),
            "perceptron" => Ok(LearnerKind::Perceptron),
            "svm" | "linear_svm" => Ok(LearnerKind::LinearSvm),
            other => Err(Error::InvalidConfig(format!("unknown learner `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    /// Targets in {0, 1}.
    Classification,
    /// Targets in [0, 255]; predictions are clamped to that range.
    Regression,
}

impl Task {
    pub fn tag(self) -> u8 {
        match self {
            Task::Classification => 0,
            Task::Regression => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Task::Classification),
            1 => Some(Task::Regression),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classification" => Ok(Task::Classification),
            "regression" => Ok(Task::Regression),
            other => Err(Error::InvalidConfig(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    pub task: Task,
    /// Tree depth cap (trees and forests); `None` grows until pure.
    pub max_depth: Option<u32>,
    pub n_trees: u32,
    pub epochs: u32,
    pub lambda: f64,
}

impl LearnerConfig {
    pub const DEFAULT_TREES: u32 = 10;
    pub const DEFAULT_EPOCHS: u32 = 5;
    pub const DEFAULT_LAMBDA: f64 = 1e-4;

    pub fn new(kind: LearnerKind, task: Task) -> Self {
        LearnerConfig {
            kind,
            task,
            max_depth: None,
            n_trees: Self::DEFAULT_TREES,
            epochs: Self::DEFAULT_EPOCHS,
            lambda: Self::DEFAULT_LAMBDA,
        }
    }

    pub fn classifier(kind: LearnerKind) -> Self {
        Self::new(kind, Task::Classification)
    }

    pub fn validate(&self) -> Result<()> {
        let linear = matches!(self.kind, LearnerKind::Perceptron | LearnerKind::LinearSvm);
        if linear && self.task != Task::Classification {
            return Err(Error::InvalidConfig(format!(
                "{} only supports binary classification",
                self.kind
            )));
        }
        if self.kind == LearnerKind::RandomForest && self.n_trees == 0 {
            return Err(Error::InvalidConfig("forest needs at least one tree".into()));
        }
        if linear && self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.kind == LearnerKind::LinearSvm && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Fitted state of one single-output learner.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerModel {
    Tree(Tree),
    Forest(Forest),
    Linear(LinearModel),
}

impl LearnerModel {
    pub fn n_features(&self) -> usize {
        match self {
            LearnerModel::Tree(t) => t.n_features(),
            LearnerModel::Forest(f) => f.n_features(),
            LearnerModel::Linear(l) => l.weights.len(),
        }
    }

    /// Class in {0, 1} or a regression value clamped to [0, 255].
    pub fn predict(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[u8]) -> f64 {
        match self {
            LearnerModel::Tree(t) => clamp_for(t.task(), t.leaf_value(x)),
            LearnerModel::Forest(f) => clamp_for(f.task(), f.aggregate(x)),
            LearnerModel::Linear(l) => l.classify(x),
        }
    }
}

fn clamp_for(task: Task, v: f64) -> f64 {
    match task {
        Task::Classification => v,
        Task::Regression => v.clamp(0.0, 255.0),
    }
}

fn check_targets(task: Task, y: &[f64]) -> Result<()> {
    for (row, &v) in y.iter().enumerate() {
        let ok = match task {
            Task::Classification => v == 0.0 || v == 1.0,
            Task::Regression => (0.0..=255.0).contains(&v),
        };
        if !ok {
            return Err(Error::TargetDomain {
                row,
                value: v,
                task: task.name(),
            });
        }
    }
    Ok(())
}

/// Fits one model. Deterministic in `(config, data, seed)`.
pub fn fit(config: &LearnerConfig, data: TrainingMatrix<'_>, seed: u64) -> Result<LearnerModel> {
    config.validate()?;
    check_targets(config.task, data.y())?;
    let (x, y) = (data.x(), data.y());
    let mut rng = Pcg32::from_seed(seed);
    Ok(match config.kind {
        LearnerKind::DecisionTree => {
            let params = GrowParams {
                task: config.task,
                max_depth: config.max_depth,
                max_features: None,
            };
            LearnerModel::Tree(tree::grow(x, y, None, params, &mut rng))
        }
        LearnerKind::RandomForest => LearnerModel::Forest(forest::fit_forest(
            x,
            y,
            config.task,
            config.n_trees,
            config.max_depth,
            &mut rng,
        )),
        LearnerKind::Perceptron => LearnerModel::Linear(linear::fit_perceptron(x, y, config.epochs).0),
        LearnerKind::LinearSvm => LearnerModel::Linear(linear::fit_svm(x, y, config.lambda, config.epochs, &mut rng)),
    })
}

/// Predicts with `model`; see [`LearnerModel::predict`].
pub fn predict(model: &LearnerModel, x: &[u8]) -> Result<f64> {
    model.predict(x)
}
