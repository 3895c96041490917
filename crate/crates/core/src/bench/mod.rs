//! Benchmark harness: runs optimizers over datasets and seeds, writes
//! per-run and mean report rows, sweeps single parameters and hosts the
//! reference baselines.

pub mod baselines;
pub mod config;
pub mod report;
pub mod sweep;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::bso::{self, ColonyOutcome};
use crate::data::{self, Dataset, SplitDataset};
use crate::fitness::{Fitness, FitnessError, WrapperFitness};
use crate::mask::FeatureMask;
use crate::optimizer::{Execution, OptimizerResult};
use crate::rso;

pub use baselines::{run_bpso_baseline, run_random_baseline, BpsoParams};
pub use config::{Algorithm, ConfigError, OutputFormat, RunConfig};
pub use report::{ReportRow, RowSeed, RowValues};
pub use sweep::{parameter_sweep, SweepParam, SweepPoint};

/// A run (or a whole dataset, when `algorithm` and `seed` are `None`)
/// that produced no result.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub dataset: String,
    pub algorithm: Option<Algorithm>,
    pub seed: Option<u64>,
    pub message: String,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.dataset)?;
        if let Some(a) = self.algorithm {
            write!(f, " / {a}")?;
        }
        if let Some(s) = self.seed {
            write!(f, " / seed {s}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Full result of one run, kept next to its report row.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub n_features: usize,
    pub result: OptimizerResult,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    /// Per-run rows in input order, then the mean rows.
    pub rows: Vec<ReportRow>,
    pub runs: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        report::to_csv_string(&self.rows)
    }

    pub fn to_markdown(&self) -> String {
        report::to_markdown(&self.rows)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Markdown => self.to_markdown(),
        }
    }

    /// Mean row of one `(dataset, algorithm)`.
    pub fn mean(&self, dataset: &str, algorithm: Algorithm) -> Option<RowValues> {
        self.rows
            .iter()
            .find(|r| {
                r.seed == RowSeed::Mean && r.dataset == dataset && r.algorithm == algorithm.name()
            })
            .and_then(|r| r.values)
    }

    pub fn runs_of(&self, dataset: &str, algorithm: Algorithm) -> impl Iterator<Item = &RunRecord> {
        let dataset = dataset.to_string();
        self.runs
            .iter()
            .filter(move |r| r.dataset == dataset && r.algorithm == algorithm)
    }
}

/// Scores the full attribute set.
pub fn run_full_features(
    data: &SplitDataset,
    knn_k: usize,
    w: f64,
) -> Result<OptimizerResult, FitnessError> {
    let fitness = WrapperFitness::new(data, knn_k, w)?;
    let start = Instant::now();
    let best = fitness.candidate(FeatureMask::ones(data.n_attributes()));
    let outcome = ColonyOutcome {
        trajectory: vec![best.fitness.scalar],
        best,
        iterations: 0,
        evaluations: fitness.evaluations(),
        taboo_fallbacks: 0,
        diversifications: 0,
    };
    bso::finish(&fitness, outcome, start.elapsed().as_secs_f64())
}

/// Runs one algorithm on one split with the run seed.
pub fn run_algorithm(
    cfg: &RunConfig,
    algorithm: Algorithm,
    split: &SplitDataset,
    seed: u64,
) -> Result<OptimizerResult, FitnessError> {
    let exec = cfg.execution;
    let p = cfg.rso_params(seed);
    match algorithm {
        Algorithm::Rso => rso::run_rso(split, &p, exec),
        Algorithm::Bso => bso::run_bso(split, &p.bso, p.knn_k, p.w, exec),
        Algorithm::None => run_full_features(split, p.knn_k, p.w),
        Algorithm::Random => run_random_baseline(split, cfg.baseline_budget(), seed, p.knn_k, p.w),
        Algorithm::Bpso => run_bpso_baseline(
            split,
            &cfg.bpso,
            cfg.baseline_budget(),
            seed,
            p.knn_k,
            p.w,
            exec,
        ),
    }
}

/// Loads and min-max normalizes every dataset of the config.
pub fn load_datasets(cfg: &RunConfig) -> Vec<(PathBuf, Result<Dataset, data::DataError>)> {
    cfg.datasets
        .iter()
        .map(|p| {
            let d = data::load_csv(p, cfg.label.clone()).map(|d| data::min_max_normalize(&d));
            (p.clone(), d)
        })
        .collect()
}

fn display_name(path: &std::path::Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs every `(dataset, algorithm, seed)` triple.
///
/// Every algorithm sees the same split for a given `(dataset, seed)`. A
/// dataset that fails to load, or a run that fails, yields rows with empty
/// values and an entry in `failures`; the batch carries on.
pub fn run_benchmark(cfg: &RunConfig) -> Result<BenchReport, ConfigError> {
    cfg.validate()?;
    let loaded = load_datasets(cfg);

    struct Job<'a> {
        dataset: String,
        algorithm: Algorithm,
        seed: u64,
        split: Result<&'a SplitDataset, String>,
    }

    let mut splits: Vec<Vec<Result<SplitDataset, String>>> = Vec::new();
    for (_, d) in &loaded {
        splits.push(match d {
            Ok(d) => cfg
                .seeds
                .iter()
                .map(|&s| {
                    data::stratified_split(d, cfg.train_fraction, s).map_err(|e| e.to_string())
                })
                .collect(),
            Err(_) => Vec::new(),
        });
    }

    let mut report = BenchReport::default();
    let mut jobs = Vec::new();
    for ((path, d), splits) in loaded.iter().zip(&splits) {
        let name = match d {
            Ok(d) => d.name.clone(),
            Err(e) => {
                report.failures.push(RunFailure {
                    dataset: display_name(path),
                    algorithm: None,
                    seed: None,
                    message: e.to_string(),
                });
                display_name(path)
            }
        };
        for &algorithm in &cfg.algorithms {
            for (i, &seed) in cfg.seeds.iter().enumerate() {
                let split = match (d, splits.get(i)) {
                    (Ok(_), Some(Ok(s))) => Ok(s),
                    (Ok(_), Some(Err(e))) => Err(e.clone()),
                    (Err(e), _) => Err(e.to_string()),
                    (Ok(_), None) => unreachable!("one split per seed"),
                };
                jobs.push(Job {
                    dataset: name.clone(),
                    algorithm,
                    seed,
                    split,
                });
            }
        }
    }

    let run = |job: &Job| -> Result<(OptimizerResult, usize), String> {
        let split = job.split.clone()?;
        run_algorithm(cfg, job.algorithm, split, job.seed)
            .map(|r| (r, split.n_attributes()))
            .map_err(|e| e.to_string())
    };
    let results: Vec<_> = match cfg.execution {
        Execution::Parallel => jobs.par_iter().map(run).collect(),
        Execution::Sequential => jobs.iter().map(run).collect(),
    };

    let dataset_failed = |name: &str| {
        report
            .failures
            .iter()
            .any(|f| f.dataset == name && f.algorithm.is_none())
    };
    let mut rows = Vec::with_capacity(jobs.len());
    let mut run_failures = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        let values = match res {
            Ok((mut result, n_features)) => {
                if !cfg.timing {
                    result.report.time_seconds = 0.0;
                }
                let v = RowValues::from_report(&result.report);
                report.runs.push(RunRecord {
                    dataset: job.dataset.clone(),
                    algorithm: job.algorithm,
                    seed: job.seed,
                    n_features,
                    result,
                });
                Some(v)
            }
            Err(message) => {
                if !dataset_failed(&job.dataset) {
                    run_failures.push(RunFailure {
                        dataset: job.dataset.clone(),
                        algorithm: Some(job.algorithm),
                        seed: Some(job.seed),
                        message,
                    });
                }
                None
            }
        };
        rows.push(ReportRow {
            dataset: job.dataset.clone(),
            algorithm: job.algorithm.name().to_string(),
            seed: RowSeed::Seed(job.seed),
            values,
        });
    }
    report.failures.extend(run_failures);
    let means = report::aggregate(&rows);
    rows.extend(means);
    report.rows = rows;
    Ok(report)
}
