//! Run configuration: a flat `key = value` file whose keys mirror the CLI
//! flags. Command-line values are applied after the file and win.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bench::baselines::BpsoParams;
use crate::bso::{BsoParams, ParamError};
use crate::data::LabelColumn;
use crate::optimizer::Execution;
use crate::rl::RlParams;
use crate::rso::RsoParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected key = value, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("no {0} given")]
    Missing(&'static str),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rso,
    Bso,
    /// All attributes, no search.
    None,
    Random,
    Bpso,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rso => "rso",
            Algorithm::Bso => "bso",
            Algorithm::None => "none",
            Algorithm::Random => "random",
            Algorithm::Bpso => "bpso",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rso" => Ok(Algorithm::Rso),
            "bso" => Ok(Algorithm::Bso),
            "none" => Ok(Algorithm::None),
            "random" => Ok(Algorithm::Random),
            "bpso" => Ok(Algorithm::Bpso),
            _ => Err(format!("unknown algorithm {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub datasets: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub knn_k: usize,
    pub train_fraction: f64,
    /// `seed` inside is overwritten per run.
    pub bso: BsoParams,
    pub rl: RlParams,
    pub w: f64,
    pub accept_worse: bool,
    pub bpso: BpsoParams,
    /// Fitness draws for the random and BPSO baselines; defaults to the
    /// RSO evaluation bound.
    pub budget: Option<usize>,
    pub label: LabelColumn,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub execution: Execution,
    /// Record wall time; when off the time column is 0 so reports are
    /// byte-reproducible.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rso = RsoParams::default();
        Self {
            datasets: Vec::new(),
            algorithms: vec![Algorithm::Rso, Algorithm::Bso, Algorithm::None],
            seeds: vec![1],
            knn_k: rso.knn_k,
            train_fraction: 0.8,
            bso: rso.bso,
            rl: rso.rl,
            w: rso.w,
            accept_worse: rso.accept_worse,
            bpso: BpsoParams::default(),
            budget: None,
            label: LabelColumn::Last,
            output: None,
            format: OutputFormat::Csv,
            execution: Execution::Parallel,
            timing: true,
        }
    }
}

/// Parses `1..10` (inclusive), `3` or comma lists mixing both.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let a: u64 = a.trim().parse().map_err(|_| format!("bad seed {a:?}"))?;
            let b: u64 = b.trim().parse().map_err(|_| format!("bad seed {b:?}"))?;
            if a > b {
                return Err(format!("empty seed range {part}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad seed {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("no seeds".into());
    }
    Ok(out)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err("expected true or false".into()),
    }
}

fn parse_list<T: FromStr<Err = String>>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(T::from_str)
        .collect()
}

fn num<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

/// `key = value` pairs of a config file, in order. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    /// Defaults overlaid with a config file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        for (k, v) in parse_config_text(&text)? {
            cfg.set(&k, &v)?;
        }
        Ok(cfg)
    }

    /// Sets one field by its flag name (`max-iter` and `max_iter` both work).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let k = key.trim().trim_start_matches("--").replace('-', "_");
        let invalid = |reason: String| ConfigError::InvalidValue {
            key: k.clone(),
            value: value.to_string(),
            reason,
        };
        let v = value.trim();
        match k.as_str() {
            "data" | "datasets" => {
                self.datasets = v
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(PathBuf::from)
                    .collect()
            }
            "algo" | "algorithms" => self.algorithms = parse_list(v).map_err(invalid)?,
            "seeds" => self.seeds = parse_seeds(v).map_err(invalid)?,
            "k" | "knn_k" => self.knn_k = num(v).map_err(invalid)?,
            "train_frac" | "train_fraction" => self.train_fraction = num(v).map_err(invalid)?,
            "flip" => self.bso.flip = num(v).map_err(invalid)?,
            "chance_max" => self.bso.chance_max = num(v).map_err(invalid)?,
            "max_iter" => self.bso.max_iter = num(v).map_err(invalid)?,
            "num_bees" => self.bso.num_bees = num(v).map_err(invalid)?,
            "ls_iter" => self.bso.ls_iter = num(v).map_err(invalid)?,
            "lr" => self.rl.lr = num(v).map_err(invalid)?,
            "alpha" => self.rl.alpha = num(v).map_err(invalid)?,
            "beta" => self.rl.beta = num(v).map_err(invalid)?,
            "w" => self.w = num(v).map_err(invalid)?,
            "accept_worse" => self.accept_worse = parse_bool(v).map_err(invalid)?,
            "inertia" => self.bpso.inertia = num(v).map_err(invalid)?,
            "cognitive" => self.bpso.cognitive = num(v).map_err(invalid)?,
            "social" => self.bpso.social = num(v).map_err(invalid)?,
            "vmax" => self.bpso.vmax = num(v).map_err(invalid)?,
            "budget" => self.budget = Some(num(v).map_err(invalid)?),
            "label" => self.label = v.parse().unwrap_or_default(),
            "out" | "output" => self.output = Some(PathBuf::from(v)),
            "format" => self.format = v.parse().map_err(invalid)?,
            "threads" | "parallel" => {
                self.execution = if parse_bool(v).map_err(invalid)? {
                    Execution::Parallel
                } else {
                    Execution::Sequential
                }
            }
            "timing" => self.timing = parse_bool(v).map_err(invalid)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn rso_params(&self, seed: u64) -> RsoParams {
        RsoParams {
            bso: BsoParams { seed, ..self.bso },
            rl: self.rl,
            knn_k: self.knn_k,
            w: self.w,
            accept_worse: self.accept_worse,
        }
    }

    /// Fitness draws granted to the baselines.
    pub fn baseline_budget(&self) -> usize {
        self.budget.unwrap_or_else(|| self.bso.evaluation_budget())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.datasets.is_empty() {
            return Err(ConfigError::Missing("dataset"));
        }
        if self.algorithms.is_empty() {
            return Err(ConfigError::Missing("algorithm"));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::Missing("seed"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(ConfigError::InvalidValue {
                key: "train_fraction".into(),
                value: self.train_fraction.to_string(),
                reason: "must lie strictly between 0 and 1".into(),
            });
        }
        if self.budget == Some(0) {
            return Err(ParamError::NotPositive("budget").into());
        }
        self.rso_params(0).validate()?;
        self.bpso.validate()?;
        Ok(())
    }
}
