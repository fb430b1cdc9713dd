//! JSON side files: corpus manifests and training records.

use std::collections::HashSet;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use shallow_art::{GeneratorConfig, ImageSpec, LearnerConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub file: String,
    /// SHA-256 of the decoded pixels and spec, hex encoded.
    pub sha256: String,
}

/// Written next to every generated or ingested corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: ImageSpec,
    /// Present for synthetic corpora.
    pub generator: Option<GeneratorConfig>,
    pub seed: Option<u64>,
    pub start: Option<u64>,
    pub files: Vec<Entry>,
}

/// Written as `<model>.train.json`: what the model was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub spec: ImageSpec,
    pub learner: LearnerConfig,
    pub base_seed: u64,
    pub training: Vec<Entry>,
}

impl TrainRecord {
    pub fn hashes(&self) -> HashSet<&str> {
        self.training.iter().map(|e| e.sha256.as_str()).collect()
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `<model>.<suffix>` alongside the model file.
pub fn sidecar(model: &Path, suffix: &str) -> std::path::PathBuf {
    let mut name = model.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    model.with_file_name(name)
}
