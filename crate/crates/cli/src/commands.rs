//! One function per subcommand. Each returns the number of per-file
//! failures; fatal problems are returned as errors.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{error, info, warn};
use shallow_art::dataset::{preprocess_corpus, read_image_file, write_image_file};
use shallow_art::metrics::{EvalReport, ImageScore};
use shallow_art::{left_half, Dataset, Error, Image, ImageSpec, Partition, Seed, WrapperModel};

use crate::config::RunConfig;
use crate::manifest::{read_json, sidecar, write_json, Entry, Manifest, TrainRecord, MANIFEST_FILE};

pub const CONFIG_FILE: &str = "config.txt";

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Image files under `input` (or `input` itself), sorted by name.
fn list_images(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .with_context(|| format!("listing {}", input.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_image(p))
        .collect();
    files.sort();
    Ok(files)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_matching(path: &Path, spec: ImageSpec) -> shallow_art::Result<Image> {
    let img = read_image_file(path, spec.encoding)?;
    if img.spec() != spec {
        return Err(Error::SpecMismatch {
            expected: spec.to_string(),
            found: img.spec().to_string(),
        });
    }
    Ok(img)
}

fn create_out(cfg: &RunConfig, command: &str) -> Result<PathBuf> {
    let out = cfg.require_out()?.to_path_buf();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(CONFIG_FILE), cfg.to_file(command))?;
    Ok(out)
}

pub fn generate(cfg: &RunConfig) -> Result<usize> {
    let out = create_out(cfg, "generate")?;
    let gen = cfg.generator();
    gen.validate()?;
    let mut files = Vec::new();
    for index in cfg.start..cfg.start + cfg.count {
        let img = gen.generate(Seed(cfg.seed), index)?;
        let name = format!("{index:06}.png");
        write_image_file(&out.join(&name), &img)?;
        files.push(Entry {
            file: name,
            sha256: img.content_hash(),
        });
    }
    info!(
        "wrote {} {} images to {}",
        files.len(),
        cfg.family.name(),
        out.display()
    );
    let manifest = Manifest {
        spec: cfg.spec,
        generator: Some(gen),
        seed: Some(cfg.seed),
        start: Some(cfg.start),
        files,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(0)
}

pub fn ingest(cfg: &RunConfig) -> Result<usize> {
    let input = cfg.require_in()?;
    let paths = list_images(input)?;
    let out = create_out(cfg, "ingest")?;
    let mut failures = 0;
    let mut raw = Vec::new();
    for path in &paths {
        match read_image_file(path, cfg.spec.encoding) {
            Ok(img) => raw.push(img),
            Err(e) => {
                error!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    let cleaned = preprocess_corpus(&raw, cfg.spec);
    info!(
        "ingested {} of {} decodable images ({} duplicates dropped)",
        cleaned.len(),
        raw.len(),
        raw.len() - cleaned.len()
    );
    let mut files = Vec::new();
    for (i, img) in cleaned.iter().enumerate() {
        let name = format!("{i:06}.png");
        write_image_file(&out.join(&name), img)?;
        files.push(Entry {
            file: name,
            sha256: img.content_hash(),
        });
    }
    let manifest = Manifest {
        spec: cfg.spec,
        generator: None,
        seed: None,
        start: None,
        files,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(failures)
}

pub fn train(cfg: &RunConfig) -> Result<usize> {
    let input = cfg.require_in()?;
    let model_path = cfg.require_model()?;
    let mut failures = 0;
    let mut ds = Dataset::new(cfg.spec)?;
    let mut training = Vec::new();
    for path in list_images(input)? {
        match load_matching(&path, cfg.spec).and_then(|img| {
            ds.push(&img, Partition::Train)?;
            Ok(img.content_hash())
        }) {
            Ok(hash) => training.push(Entry {
                file: file_name(&path),
                sha256: hash,
            }),
            Err(e) => {
                error!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    if ds.is_empty() {
        return Err(Error::InsufficientData(format!("no usable {} images in {}", cfg.spec, input.display())).into());
    }
    info!(
        "training {} {} models on {} images with {} workers",
        cfg.spec.half_len(),
        cfg.learner.kind,
        ds.len(),
        cfg.workers
    );
    let (wm, report) = WrapperModel::fit(&ds, &cfg.learner, cfg.seed, cfg.workers)?;
    info!("trained {} models in {:.2}s", report.outputs_trained, report.total_secs);
    if let Some(dir) = model_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(model_path, wm.to_bytes()).with_context(|| format!("writing {}", model_path.display()))?;
    fs::write(sidecar(model_path, CONFIG_FILE), cfg.to_file("train"))?;
    write_json(&sidecar(model_path, "report.json"), &report)?;
    let record = TrainRecord {
        spec: cfg.spec,
        learner: cfg.learner,
        base_seed: cfg.seed,
        training,
    };
    write_json(&sidecar(model_path, "train.json"), &record)?;
    Ok(failures)
}

fn load_model(path: &Path) -> Result<WrapperModel> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    WrapperModel::from_bytes(&bytes).with_context(|| format!("loading {}", path.display()))
}

pub fn complete(cfg: &RunConfig) -> Result<usize> {
    let wm = load_model(cfg.require_model()?)?;
    let paths = list_images(cfg.require_in()?)?;
    let out = create_out(cfg, "complete")?;
    let spec = wm.spec();
    let mut failures = 0;
    for path in &paths {
        // Accept either a full image (its left half is used) or a bare left half.
        let result = read_image_file(path, spec.encoding).and_then(|img| {
            let left = if img.spec() == spec { left_half(&img)? } else { img };
            wm.complete(&left)
        });
        match result {
            Ok(done) => {
                let name = format!("{}.png", path.file_stem().unwrap_or_default().to_string_lossy());
                write_image_file(&out.join(name), &done)?;
            }
            Err(e) => {
                error!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    info!("completed {} of {} images", paths.len() - failures, paths.len());
    Ok(failures)
}

pub fn evaluate(cfg: &RunConfig) -> Result<usize> {
    let model_path = cfg.require_model()?;
    let wm = load_model(model_path)?;
    let input = cfg.require_in()?;
    let paths = list_images(input)?;
    let out = create_out(cfg, "evaluate")?;
    let record_path = sidecar(model_path, "train.json");
    let seen: Option<TrainRecord> = record_path.exists().then(|| read_json(&record_path)).transpose()?;
    let trained: HashSet<&str> = seen.as_ref().map(|r| r.hashes()).unwrap_or_default();
    if seen.is_none() {
        warn!("no {} found; train/test overlap is not checked", record_path.display());
    }
    let mut failures = 0;
    let mut warnings = Vec::new();
    let mut scores = Vec::new();
    for path in &paths {
        let name = file_name(path);
        let scored = load_matching(path, wm.spec()).and_then(|truth| {
            if trained.contains(truth.content_hash().as_str()) {
                warnings.push(format!("{name} is also a training image"));
            }
            let pred = wm.complete(&left_half(&truth)?)?;
            ImageScore::compute(&name, &pred, &truth)
        });
        match scored {
            Ok(s) => scores.push(s),
            Err(e) => {
                error!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    for w in &warnings {
        warn!("{w}");
    }
    if scores.is_empty() {
        bail!(Error::InsufficientData(format!(
            "no images evaluated from {}",
            input.display()
        )));
    }
    let report = EvalReport::from_scores(scores, warnings)?;
    fs::write(out.join("report.txt"), report.to_text())?;
    write_json(&out.join("report.json"), &report)?;
    match report.mean_pixel_accuracy {
        Some(acc) => info!("{} images, mean pixel accuracy {acc:.4}", report.images),
        None => info!(
            "{} images, mean channel MAE {:.3}",
            report.images, report.mean_channel_mae
        ),
    }
    Ok(failures)
}
