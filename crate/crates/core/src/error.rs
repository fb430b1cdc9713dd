use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("image decode failed: {0}")]
    Decode(String),
    #[error("image encode failed: {0}")]
    Encode(String),
    #[error("spec mismatch: expected {expected}, found {found}")]
    SpecMismatch { expected: String, found: String },
    #[error("shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("value {value} at position {index} is outside {range}")]
    Range {
        index: usize,
        value: f64,
        range: &'static str,
    },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("target {value} at row {row} is not a valid {task} target")]
    TargetDomain { row: usize, value: f64, task: &'static str },
    #[error("wrong encoding: {0}")]
    Encoding(String),
    #[error("rectangle {0} lies outside the image")]
    Bounds(String),
    #[error("sample already present in the {0} partition")]
    PartitionOverlap(&'static str),
    #[error("bad magic bytes, not a wrapper-model container")]
    BadMagic,
    #[error("unsupported container version {found} (newest supported is {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("truncated container: {0}")]
    Truncated(String),
    #[error("malformed container: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
