//! One-parameter sweeps: rerun the benchmark for each value of a single
//! BSO or Q-learning parameter and keep the per-value means.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::bench::config::{ConfigError, RunConfig};
use crate::bench::{run_benchmark, RowSeed, RunFailure};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("unknown sweep parameter {0:?}")]
    UnknownParameter(String),
    #[error("invalid sweep values {spec:?}: {reason}")]
    InvalidValues { spec: String, reason: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Flip,
    ChanceMax,
    MaxIter,
    NumBees,
    LsIter,
    Lr,
    Alpha,
    Beta,
}

impl SweepParam {
    pub const ALL: [SweepParam; 8] = [
        SweepParam::Flip,
        SweepParam::ChanceMax,
        SweepParam::MaxIter,
        SweepParam::NumBees,
        SweepParam::LsIter,
        SweepParam::Lr,
        SweepParam::Alpha,
        SweepParam::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Flip => "flip",
            SweepParam::ChanceMax => "chance_max",
            SweepParam::MaxIter => "max_iter",
            SweepParam::NumBees => "num_bees",
            SweepParam::LsIter => "ls_iter",
            SweepParam::Lr => "lr",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
        }
    }

    pub fn is_integer(self) -> bool {
        !matches!(self, SweepParam::Lr | SweepParam::Alpha | SweepParam::Beta)
    }

    /// 1..=10 for counts, 0.0..=1.0 in steps of 0.1 for rates.
    pub fn default_values(self) -> Vec<f64> {
        if self.is_integer() {
            (1..=10).map(f64::from).collect()
        } else {
            (0..=10).map(|i| f64::from(i) / 10.0).collect()
        }
    }

    /// Copy of `cfg` with this parameter set to `value`.
    pub fn apply(self, cfg: &RunConfig, value: f64) -> Result<RunConfig, SweepError> {
        if self.is_integer() && (value.fract() != 0.0 || value < 0.0) {
            return Err(SweepError::InvalidValues {
                spec: value.to_string(),
                reason: format!("{} takes whole numbers", self.name()),
            });
        }
        let mut out = cfg.clone();
        out.set(self.name(), &value.to_string())?;
        Ok(out)
    }
}

impl FromStr for SweepParam {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k = s.trim().replace('-', "_");
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == k)
            .ok_or_else(|| SweepError::UnknownParameter(s.to_string()))
    }
}

/// `start:end:step` (inclusive) or a comma list.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, SweepError> {
    let bad = |reason: &str| SweepError::InvalidValues {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let spec_t = spec.trim();
    if spec_t.contains(':') {
        let parts: Vec<f64> = spec_t
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("expected numbers"))?;
        let [start, end, step] = parts[..] else {
            return Err(bad("expected start:end:step"));
        };
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(bad("need step > 0 and start <= end"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        // Rounded so 0.1 steps print as 0.3, not 0.30000000000000004.
        return Ok((0..=count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    let values: Vec<f64> = spec_t
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| bad("expected numbers"))?;
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(values)
}

/// Mean over seeds for one value of the swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub dataset: String,
    pub algorithm: String,
    pub accuracy_pct: f64,
    pub time_seconds: f64,
    pub num_features: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    pub failures: Vec<RunFailure>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
            w.write_record([
                "parameter",
                "value",
                "dataset",
                "algorithm",
                "accuracy_pct",
                "time_seconds",
                "num_features",
            ])?;
            for p in &self.points {
                w.write_record([
                    self.parameter.clone(),
                    p.value.to_string(),
                    p.dataset.clone(),
                    p.algorithm.clone(),
                    format!("{:.2}", p.accuracy_pct),
                    format!("{:.4}", p.time_seconds),
                    format!("{:.2}", p.num_features),
                ])?;
            }
            Ok(())
        };
        write(&mut w).expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("UTF-8")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "| {} | dataset | algorithm | accuracy_pct | time_seconds | num_features |",
            self.parameter
        );
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for p in &self.points {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.2} | {:.4} | {:.2} |",
                p.value, p.dataset, p.algorithm, p.accuracy_pct, p.time_seconds, p.num_features
            );
        }
        s
    }
}

/// Runs the benchmark once per value; `values = None` uses the defaults of
/// the parameter.
pub fn parameter_sweep(
    cfg: &RunConfig,
    parameter: &str,
    values: Option<&[f64]>,
) -> Result<SweepReport, SweepError> {
    let param: SweepParam = parameter.parse()?;
    let values = values.map_or_else(|| param.default_values(), <[f64]>::to_vec);
    let mut out = SweepReport {
        parameter: param.name().to_string(),
        ..SweepReport::default()
    };
    for &v in &values {
        let run_cfg = param.apply(cfg, v)?;
        let report = run_benchmark(&run_cfg)?;
        for row in report.rows.iter().filter(|r| r.seed == RowSeed::Mean) {
            let m = row.values.expect("mean rows carry values");
            out.points.push(SweepPoint {
                value: v,
                dataset: row.dataset.clone(),
                algorithm: row.algorithm.clone(),
                accuracy_pct: m.accuracy_pct,
                time_seconds: m.time_seconds,
                num_features: m.num_features,
            });
        }
        out.failures.extend(report.failures);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_specs() {
        let v = parse_values("0:1:0.1").unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[3], 0.3);
        assert_eq!(v[10], 1.0);
        assert_eq!(parse_values("1, 2,5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert_eq!(parse_values("2:6:2").unwrap(), vec![2.0, 4.0, 6.0]);
        assert!(parse_values("1:0:1").is_err());
        assert!(parse_values("a").is_err());
    }

    #[test]
    fn parameters() {
        assert_eq!(
            "chance-max".parse::<SweepParam>().unwrap(),
            SweepParam::ChanceMax
        );
        assert!(matches!(
            "gamma".parse::<SweepParam>(),
            Err(SweepError::UnknownParameter(_))
        ));
        assert_eq!(SweepParam::Lr.default_values().len(), 11);
        assert_eq!(SweepParam::Flip.default_values().len(), 10);
        let cfg = RunConfig::default();
        assert_eq!(
            SweepParam::MaxIter.apply(&cfg, 3.0).unwrap().bso.max_iter,
            3
        );
        assert!(SweepParam::MaxIter.apply(&cfg, 2.5).is_err());
        assert_eq!(SweepParam::Beta.apply(&cfg, 0.3).unwrap().rl.beta, 0.3);
    }
}
