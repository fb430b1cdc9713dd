//! Run configuration: built-in defaults, then an optional flat
//! `key = value` file, then command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::Serialize;
use shallow_art::{Encoding, Family, GeneratorConfig, ImageSpec, LearnerConfig, LearnerKind, Task};

/// Environment variable that supplies the worker count when neither the
/// config file nor `--workers` does.
pub const WORKERS_ENV: &str = "SHALLOW_ART_WORKERS";

/// Tree depth cap; `none` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Depth(pub Option<u32>);

impl FromStr for Depth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" | "unbounded" => Ok(Depth(None)),
            n => n
                .parse()
                .map(|d| Depth(Some(d)))
                .map_err(|e| format!("bad depth `{n}`: {e}")),
        }
    }
}

impl std::fmt::Display for Depth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("none"),
        }
    }
}

/// Every setting a command may read. Unset fields fall through to the
/// config file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Generator family: horizontal, vertical, circles, triangle, triangle_color.
    #[arg(long, global = true)]
    pub family: Option<Family>,
    /// Number of images to generate.
    #[arg(long, global = true)]
    pub count: Option<u64>,
    /// Index of the first generated image (use a disjoint range for held-out sets).
    #[arg(long, global = true)]
    pub start: Option<u64>,
    /// Lines or disks per image.
    #[arg(long, global = true)]
    pub shapes: Option<u32>,
    /// Disk diameter in pixels.
    #[arg(long, global = true)]
    pub diameter: Option<f64>,
    #[arg(long, global = true)]
    pub width: Option<u32>,
    #[arg(long, global = true)]
    pub height: Option<u32>,
    /// bw or rgb.
    #[arg(long, global = true)]
    pub encoding: Option<Encoding>,
    /// tree, forest, perceptron or svm.
    #[arg(long, global = true)]
    pub learner: Option<LearnerKind>,
    /// classification or regression; defaults from the encoding.
    #[arg(long, global = true)]
    pub task: Option<Task>,
    #[arg(long, global = true)]
    pub trees: Option<u32>,
    #[arg(long, global = true)]
    pub epochs: Option<u32>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Tree depth cap, or `none`.
    #[arg(long = "max-depth", global = true)]
    pub max_depth: Option<Depth>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Input file or directory.
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Model file.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow!("config key `{key}`: {e}"))
}

impl Overrides {
    /// Parses a flat `key = value` file. Blank lines and `#` comments are
    /// skipped; keys may use `-` or `_`.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected `key = value`", n + 1))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "family" => o.family = Some(parse(&key, value)?),
                "count" => o.count = Some(parse(&key, value)?),
                "start" => o.start = Some(parse(&key, value)?),
                "shapes" => o.shapes = Some(parse(&key, value)?),
                "diameter" => o.diameter = Some(parse(&key, value)?),
                "width" => o.width = Some(parse(&key, value)?),
                "height" => o.height = Some(parse(&key, value)?),
                "encoding" => o.encoding = Some(parse(&key, value)?),
                "learner" => o.learner = Some(parse(&key, value)?),
                "task" => o.task = Some(parse(&key, value)?),
                "trees" => o.trees = Some(parse(&key, value)?),
                "epochs" => o.epochs = Some(parse(&key, value)?),
                "lambda" => o.lambda = Some(parse(&key, value)?),
                "max_depth" => o.max_depth = Some(parse(&key, value)?),
                "seed" => o.seed = Some(parse(&key, value)?),
                "workers" => o.workers = Some(parse(&key, value)?),
                "in" => o.input = Some(PathBuf::from(value)),
                "out" => o.out = Some(PathBuf::from(value)),
                "model" => o.model = Some(PathBuf::from(value)),
                other => bail!("config line {}: unknown key `{other}`", n + 1),
            }
        }
        Ok(o)
    }

    /// Fields set here win; the rest come from `lower`.
    pub fn or(self, lower: Overrides) -> Overrides {
        Overrides {
            config: self.config.or(lower.config),
            family: self.family.or(lower.family),
            count: self.count.or(lower.count),
            start: self.start.or(lower.start),
            shapes: self.shapes.or(lower.shapes),
            diameter: self.diameter.or(lower.diameter),
            width: self.width.or(lower.width),
            height: self.height.or(lower.height),
            encoding: self.encoding.or(lower.encoding),
            learner: self.learner.or(lower.learner),
            task: self.task.or(lower.task),
            trees: self.trees.or(lower.trees),
            epochs: self.epochs.or(lower.epochs),
            lambda: self.lambda.or(lower.lambda),
            max_depth: self.max_depth.or(lower.max_depth),
            seed: self.seed.or(lower.seed),
            workers: self.workers.or(lower.workers),
            input: self.input.or(lower.input),
            out: self.out.or(lower.out),
            model: self.model.or(lower.model),
        }
    }
}

/// Fully resolved settings; every default is filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub family: Family,
    pub count: u64,
    pub start: u64,
    pub shapes: u32,
    pub diameter: f64,
    pub spec: ImageSpec,
    pub learner: LearnerConfig,
    pub seed: u64,
    pub workers: usize,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

pub const DEFAULT_COUNT: u64 = 50;

fn default_workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{WORKERS_ENV}=`{v}` is not a worker count")),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

impl RunConfig {
    /// Layers `flags` over the file named by `--config` (if any) over the
    /// defaults.
    pub fn resolve(flags: Overrides) -> Result<Self> {
        let merged = match &flags.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                let file = Overrides::parse_file(&text).with_context(|| format!("in {}", path.display()))?;
                flags.or(file)
            }
            None => flags,
        };
        Self::from_overrides(merged)
    }

    pub fn from_overrides(o: Overrides) -> Result<Self> {
        let family = o.family.unwrap_or(Family::HorizontalLines);
        let encoding = o.encoding.unwrap_or_else(|| family.encoding());
        let default = match encoding {
            Encoding::Bw => ImageSpec::BW_DEFAULT,
            Encoding::Rgb => ImageSpec::RGB_DEFAULT,
        };
        let spec = ImageSpec::new(
            o.width.unwrap_or(default.width),
            o.height.unwrap_or(default.height),
            encoding,
        )?;
        let gen_default = GeneratorConfig::new(family);
        let kind = o.learner.unwrap_or(LearnerKind::DecisionTree);
        let task = o.task.unwrap_or(match encoding {
            Encoding::Bw => Task::Classification,
            Encoding::Rgb => Task::Regression,
        });
        let learner = LearnerConfig {
            kind,
            task,
            max_depth: o.max_depth.and_then(|d| d.0),
            n_trees: o.trees.unwrap_or(LearnerConfig::DEFAULT_TREES),
            epochs: o.epochs.unwrap_or(LearnerConfig::DEFAULT_EPOCHS),
            lambda: o.lambda.unwrap_or(LearnerConfig::DEFAULT_LAMBDA),
        };
        learner.validate()?;
        let workers = match o.workers {
            Some(w) => w,
            None => default_workers()?,
        };
        if workers == 0 {
            bail!("workers must be at least 1");
        }
        Ok(RunConfig {
            family,
            count: o.count.unwrap_or(DEFAULT_COUNT),
            start: o.start.unwrap_or(0),
            shapes: o.shapes.unwrap_or(gen_default.count),
            diameter: o.diameter.unwrap_or(gen_default.diameter),
            spec,
            learner,
            seed: o.seed.unwrap_or(0),
            workers,
            input: o.input,
            out: o.out,
            model: o.model,
        })
    }

    pub fn generator(&self) -> GeneratorConfig {
        GeneratorConfig {
            family: self.family,
            count: self.shapes,
            diameter: self.diameter,
            spec: self.spec,
        }
    }

    pub fn require_in(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| anyhow!("--in is required"))
    }

    pub fn require_out(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| anyhow!("--out is required"))
    }

    pub fn require_model(&self) -> Result<&Path> {
        self.model.as_deref().ok_or_else(|| anyhow!("--model is required"))
    }

    /// The `key = value` form read back by `--config`.
    pub fn to_file(&self, command: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# shallow-art {command}");
        let _ = writeln!(s, "family = {}", self.family.name());
        let _ = writeln!(s, "count = {}", self.count);
        let _ = writeln!(s, "start = {}", self.start);
        let _ = writeln!(s, "shapes = {}", self.shapes);
        let _ = writeln!(s, "diameter = {}", self.diameter);
        let _ = writeln!(s, "width = {}", self.spec.width);
        let _ = writeln!(s, "height = {}", self.spec.height);
        let _ = writeln!(s, "encoding = {}", self.spec.encoding.name());
        let _ = writeln!(s, "learner = {}", self.learner.kind);
        let _ = writeln!(s, "task = {}", self.learner.task.name());
        let _ = writeln!(s, "trees = {}", self.learner.n_trees);
        let _ = writeln!(s, "epochs = {}", self.learner.epochs);
        let _ = writeln!(s, "lambda = {:e}", self.learner.lambda);
        let _ = writeln!(s, "max_depth = {}", Depth(self.learner.max_depth));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "workers = {}", self.workers);
        for (key, path) in [("in", &self.input), ("out", &self.out), ("model", &self.model)] {
            if let Some(p) = path {
                let _ = writeln!(s, "{key} = {}", p.display());
            }
        }
        s
    }
}
