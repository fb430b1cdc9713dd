//! Classical per-pixel image completion.
//!
//! An image is cut down the middle; every value of the right half is
//! predicted by its own single-output learner that sees the whole left
//! half. The pieces:
//!
//! * [`imagegen`] draws the synthetic corpora (lines, circles, triangles).
//! * [`dataset`] handles PNG/JPEG I/O, corpus cleanup and the
//!   attribute/label split.
//! * [`learners`] holds the from-scratch decision tree, random forest,
//!   perceptron and linear SVM.
//! * [`wrapper`] trains one learner per output value and persists the
//!   result.
//! * [`metrics`] scores completed images.

pub mod dataset;
pub mod error;
pub mod image;
pub mod imagegen;
pub mod learners;
pub mod metrics;
pub mod rng;
pub mod wrapper;

pub use crate::dataset::{assemble, flatten_split, left_half, Dataset, FlatSample, Partition};
pub use crate::error::{Error, Result};
pub use crate::image::{Encoding, Image, ImageSpec};
pub use crate::imagegen::{Family, GeneratorConfig, Orientation};
pub use crate::learners::{LearnerConfig, LearnerKind, LearnerModel, Task};
pub use crate::rng::{mix64, Pcg32, Seed};
pub use crate::wrapper::{TrainReport, WrapperModel};
