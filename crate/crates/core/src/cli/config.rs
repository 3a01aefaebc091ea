//! `key=value` run configuration files and their flag overrides.

use std::path::{Path, PathBuf};

use clap::Args;

use crate::embedding::Alignment;
use crate::experiment::{EmbeddingSource, EvalReport, RunConfig};
use crate::ingest::SplitSpec;

/// Every key accepted in a config file (and as `--key value`).
pub const KEYS: &[&str] = &[
    "dataset",
    "format",
    "bins",
    "overlap",
    "split",
    "ratio",
    "test_timestep",
    "embedding",
    "embedding_path",
    "alignment",
    "dim",
    "history",
    "series_length",
    "predictor",
    "layers",
    "input_window",
    "epochs",
    "step_size",
    "batch",
    "clip",
    "sampling_seed",
    "model_seed",
    "seed",
    "output",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?} as a number"))
}

impl RunConfig {
    /// Apply one setting. Dashes in `key` are treated as underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "format" => self.format = value.parse().map_err(|e| format!("{e}"))?,
            "bins" => self.bins = num(&key, value)?,
            "overlap" => self.overlap = num(&key, value)?,
            "split" => {
                self.split = match value.split_once(':') {
                    Some(("ratio", f)) => SplitSpec::RatioByTime {
                        train_fraction: num(&key, f)?,
                    },
                    Some(("holdout", t)) => SplitSpec::PerYearHoldout {
                        test_timestep: num(&key, t)?,
                    },
                    None if value == "ratio" => match self.split {
                        s @ SplitSpec::RatioByTime { .. } => s,
                        _ => SplitSpec::default(),
                    },
                    _ => return Err(format!("split: expected `ratio[:F]` or `holdout:T`, got {value:?}")),
                }
            }
            "ratio" => {
                self.split = SplitSpec::RatioByTime {
                    train_fraction: num(&key, value)?,
                }
            }
            "test_timestep" => {
                self.split = SplitSpec::PerYearHoldout {
                    test_timestep: num(&key, value)?,
                }
            }
            "embedding" => {
                self.embedding = match value.split_once(':') {
                    Some(("file", path)) => EmbeddingSource::File { path: path.into() },
                    None if value == "builtin" => EmbeddingSource::default(),
                    _ => return Err(format!("embedding: expected `builtin` or `file:PATH`, got {value:?}")),
                }
            }
            "embedding_path" => self.embedding = EmbeddingSource::File { path: value.into() },
            "alignment" => {
                let alignment: Alignment = value.parse().map_err(|e| format!("{e}"))?;
                self.embedding = EmbeddingSource::Builtin { alignment };
            }
            "dim" => self.dim = num(&key, value)?,
            "history" | "h" => self.history = num(&key, value)?,
            "series_length" | "l" => self.series_length = num(&key, value)?,
            "predictor" => self.predictor = value.parse().map_err(|e| format!("{e}"))?,
            "layers" => {
                self.layers = value
                    .split(',')
                    .map(|w| num(&key, w.trim()))
                    .collect::<Result<_, _>>()?
            }
            "input_window" => self.input_window = if value == "auto" { None } else { Some(num(&key, value)?) },
            "epochs" => self.train.epochs = num(&key, value)?,
            "step_size" => self.train.step_size = num(&key, value)?,
            "batch" => self.train.batch = num(&key, value)?,
            "clip" => self.train.gradient_clip = num(&key, value)?,
            "sampling_seed" => self.sampling_seed = num(&key, value)?,
            "model_seed" => self.model_seed = num(&key, value)?,
            "seed" => {
                let s = num(&key, value)?;
                self.sampling_seed = s;
                self.model_seed = s;
            }
            "output" => self.output = PathBuf::from(value),
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Apply a `key=value` document; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            self.set(k, v).map_err(|e| format!("config line {}: {e}", i + 1))?;
        }
        Ok(())
    }
}

/// Config sources shared by the pipeline subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// key=value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Reuse the configuration embedded in a previous report.json
    #[arg(long, conflicts_with = "config")]
    pub from_report: Option<PathBuf>,

    #[arg(long)]
    pub dataset: Option<String>,
    /// triple | coauthorship-csv | graph
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub bins: Option<String>,
    #[arg(long)]
    pub overlap: Option<String>,
    /// ratio[:F] | holdout:T
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long)]
    pub ratio: Option<String>,
    #[arg(long)]
    pub test_timestep: Option<String>,
    /// builtin | file:PATH
    #[arg(long)]
    pub embedding: Option<String>,
    #[arg(long)]
    pub embedding_path: Option<String>,
    /// procrustes | none
    #[arg(long)]
    pub alignment: Option<String>,
    #[arg(long)]
    pub dim: Option<String>,
    #[arg(long)]
    pub history: Option<String>,
    #[arg(long)]
    pub series_length: Option<String>,
    /// recurrent | persistence | linear-extrapolation | exponential-smoothing
    #[arg(long)]
    pub predictor: Option<String>,
    /// Hidden widths, comma separated
    #[arg(long)]
    pub layers: Option<String>,
    #[arg(long)]
    pub input_window: Option<String>,
    #[arg(long)]
    pub epochs: Option<String>,
    #[arg(long)]
    pub step_size: Option<String>,
    #[arg(long)]
    pub batch: Option<String>,
    #[arg(long)]
    pub clip: Option<String>,
    #[arg(long)]
    pub sampling_seed: Option<String>,
    #[arg(long)]
    pub model_seed: Option<String>,
    /// Sets both seeds
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
}

impl ConfigArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let fields: [(&'static str, &Option<String>); 24] = [
            ("dataset", &self.dataset),
            ("format", &self.format),
            ("bins", &self.bins),
            ("overlap", &self.overlap),
            ("split", &self.split),
            ("ratio", &self.ratio),
            ("test_timestep", &self.test_timestep),
            ("embedding", &self.embedding),
            ("embedding_path", &self.embedding_path),
            ("alignment", &self.alignment),
            ("dim", &self.dim),
            ("history", &self.history),
            ("series_length", &self.series_length),
            ("predictor", &self.predictor),
            ("layers", &self.layers),
            ("input_window", &self.input_window),
            ("epochs", &self.epochs),
            ("step_size", &self.step_size),
            ("batch", &self.batch),
            ("clip", &self.clip),
            ("seed", &self.seed),
            ("sampling_seed", &self.sampling_seed),
            ("model_seed", &self.model_seed),
            ("output", &self.output),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }

    /// Defaults, then the file (or report), then flags.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.from_report {
            Some(path) => EvalReport::read_json(path).map_err(ConfigError::Source)?.config,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = read_config(path)?;
            cfg.apply_text(&text).map_err(ConfigError::Usage)?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, v)
                .map_err(|e| ConfigError::Usage(format!("--{}: {e}", k.replace('_', "-"))))?;
        }
        Ok(cfg)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
    Source(crate::Error),
}

fn read_config(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Source(crate::Error::io(path, e)))
}
