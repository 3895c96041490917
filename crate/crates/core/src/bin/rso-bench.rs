//! Command-line front end for the benchmark harness.
//!
//! Exit codes: 0 success, 1 configuration error, 2 some runs failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rso::bench::config::{ConfigError, OutputFormat, RunConfig};
use rso::bench::run_benchmark;
use rso::bench::sweep::{self, parameter_sweep};

#[derive(Parser)]
#[command(
    name = "rso-bench",
    version,
    about = "Feature-selection benchmarks for RSO, BSO and baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run algorithms over datasets and seeds and write a report.
    Run(RunArgs),
    /// Rerun the benchmark for each value of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// flip, chance_max, max_iter, num_bees, ls_iter, lr, alpha or beta.
        #[arg(long)]
        param: String,
        /// `start:end:step` or a comma list; defaults to the parameter's range.
        #[arg(long)]
        values: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    data: Vec<String>,
    /// Comma list of rso, bso, none, random, bpso.
    #[arg(long)]
    algo: Option<String>,
    /// `1..10`, `3` or a comma list.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    train_frac: Option<String>,
    #[arg(long)]
    flip: Option<String>,
    #[arg(long)]
    chance_max: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    num_bees: Option<String>,
    #[arg(long)]
    ls_iter: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    accept_worse: Option<String>,
    /// Fitness draws for the random and bpso baselines.
    #[arg(long)]
    budget: Option<String>,
    /// `last`, a column index or a header name.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv or markdown.
    #[arg(long)]
    format: Option<String>,
    /// Run everything on one thread.
    #[arg(long)]
    sequential: bool,
    /// Write 0 in the time column so reports are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if !self.data.is_empty() {
            cfg.set("data", &self.data.join(","))?;
        }
        let flags = [
            ("algo", self.algo),
            ("seeds", self.seeds),
            ("k", self.k),
            ("train_frac", self.train_frac),
            ("flip", self.flip),
            ("chance_max", self.chance_max),
            ("max_iter", self.max_iter),
            ("num_bees", self.num_bees),
            ("ls_iter", self.ls_iter),
            ("lr", self.lr),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("w", self.w),
            ("accept_worse", self.accept_worse),
            ("budget", self.budget),
            ("label", self.label),
            ("out", self.out),
            ("format", self.format),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if self.sequential {
            cfg.set("parallel", "false")?;
        }
        if self.no_timing {
            cfg.set("timing", "false")?;
        }
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, sweep_args) = match cli.command {
        Command::Run(a) => (a.into_config(), None),
        Command::Sweep { run, param, values } => (run.into_config(), Some((param, values))),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let (text, failures) = match sweep_args {
        None => match run_benchmark(&cfg) {
            Ok(r) => (r.render(cfg.format), r.failures),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        Some((param, values)) => {
            let values = match values.as_deref().map(sweep::parse_values).transpose() {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match parameter_sweep(&cfg, &param, values.as_deref()) {
                Ok(r) => {
                    let text = match cfg.format {
                        OutputFormat::Csv => r.to_csv(),
                        OutputFormat::Markdown => r.to_markdown(),
                    };
                    (text, r.failures)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    };
    if let Err(e) = emit(&cfg, &text) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    for f in &failures {
        eprintln!("failed: {f}");
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
