//! Report rows and their CSV / markdown forms.

use std::fmt::Write as _;
use std::io;

use crate::optimizer::EvalReport;

pub const REPORT_HEADER: [&str; 9] = [
    "dataset",
    "algorithm",
    "seed",
    "accuracy_pct",
    "precision_pct",
    "recall_pct",
    "f1_pct",
    "num_features",
    "time_seconds",
];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("report header mismatch: {0}")]
    Header(String),
    #[error("report line {line}: {reason}")]
    Row { line: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSeed {
    Seed(u64),
    /// Mean over all seeds of one `(dataset, algorithm)`.
    Mean,
}

impl std::fmt::Display for RowSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowSeed::Seed(s) => write!(f, "{s}"),
            RowSeed::Mean => f.write_str("mean"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowValues {
    pub accuracy_pct: f64,
    pub precision_pct: f64,
    pub recall_pct: f64,
    pub f1_pct: f64,
    /// Integral for single runs, a mean on aggregate rows.
    pub num_features: f64,
    pub time_seconds: f64,
}

impl RowValues {
    pub fn from_report(r: &EvalReport) -> Self {
        Self {
            accuracy_pct: r.metrics.accuracy * 100.0,
            precision_pct: r.metrics.precision * 100.0,
            recall_pct: r.metrics.recall * 100.0,
            f1_pct: r.metrics.f1 * 100.0,
            num_features: r.num_features as f64,
            time_seconds: r.time_seconds,
        }
    }

    fn mean(values: &[RowValues]) -> Self {
        let n = values.len() as f64;
        let avg = |f: fn(&RowValues) -> f64| values.iter().map(f).sum::<f64>() / n;
        Self {
            accuracy_pct: avg(|v| v.accuracy_pct),
            precision_pct: avg(|v| v.precision_pct),
            recall_pct: avg(|v| v.recall_pct),
            f1_pct: avg(|v| v.f1_pct),
            num_features: avg(|v| v.num_features),
            time_seconds: avg(|v| v.time_seconds),
        }
    }
}

/// One line of a report. `values` is `None` for a run that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub algorithm: String,
    pub seed: RowSeed,
    pub values: Option<RowValues>,
}

fn pct(v: f64) -> String {
    format!("{v:.2}")
}

fn features(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn seconds(v: f64) -> String {
    format!("{v:.4}")
}

impl ReportRow {
    fn fields(&self) -> [String; 9] {
        let (a, p, r, f, k, t) = match &self.values {
            Some(v) => (
                pct(v.accuracy_pct),
                pct(v.precision_pct),
                pct(v.recall_pct),
                pct(v.f1_pct),
                features(v.num_features),
                seconds(v.time_seconds),
            ),
            None => Default::default(),
        };
        [
            self.dataset.clone(),
            self.algorithm.clone(),
            self.seed.to_string(),
            a,
            p,
            r,
            f,
            k,
            t,
        ]
    }

    /// The row as it reads back after a trip through the CSV form.
    pub fn quantized(&self) -> ReportRow {
        let q = |s: String| s.parse::<f64>().unwrap();
        ReportRow {
            values: self.values.map(|v| RowValues {
                accuracy_pct: q(pct(v.accuracy_pct)),
                precision_pct: q(pct(v.precision_pct)),
                recall_pct: q(pct(v.recall_pct)),
                f1_pct: q(pct(v.f1_pct)),
                num_features: q(features(v.num_features)),
                time_seconds: q(seconds(v.time_seconds)),
            }),
            ..self.clone()
        }
    }
}

/// Mean rows, one per `(dataset, algorithm)` in first-appearance order.
/// Failed runs are left out of the mean; a pair with no successful run
/// gets no mean row.
pub fn aggregate(rows: &[ReportRow]) -> Vec<ReportRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows.iter().filter(|r| r.seed != RowSeed::Mean) {
        let key = (r.dataset.as_str(), r.algorithm.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .filter_map(|(d, a)| {
            let values: Vec<RowValues> = rows
                .iter()
                .filter(|r| r.dataset == d && r.algorithm == a && r.seed != RowSeed::Mean)
                .filter_map(|r| r.values)
                .collect();
            (!values.is_empty()).then(|| ReportRow {
                dataset: d.to_string(),
                algorithm: a.to_string(),
                seed: RowSeed::Mean,
                values: Some(RowValues::mean(&values)),
            })
        })
        .collect()
}

pub fn write_csv<W: io::Write>(rows: &[ReportRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ReportRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("report is UTF-8")
}

pub fn to_markdown(rows: &[ReportRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "| {} |", REPORT_HEADER.join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(REPORT_HEADER.len()));
    for r in rows {
        let _ = writeln!(s, "| {} |", r.fields().join(" | "));
    }
    s
}

/// Reads a CSV report back.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>, ReportError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(REPORT_HEADER) {
        return Err(ReportError::Header(
            header.iter().collect::<Vec<_>>().join(","),
        ));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |reason: String| ReportError::Row { line, reason };
        let seed = match &rec[2] {
            "mean" => RowSeed::Mean,
            s => RowSeed::Seed(s.parse().map_err(|_| bad(format!("bad seed {s:?}")))?),
        };
        let values = if rec.iter().skip(3).all(str::is_empty) {
            None
        } else {
            let mut nums = [0.0; 6];
            for (slot, cell) in nums.iter_mut().zip(rec.iter().skip(3)) {
                *slot = cell
                    .parse()
                    .map_err(|_| bad(format!("bad number {cell:?}")))?;
            }
            Some(RowValues {
                accuracy_pct: nums[0],
                precision_pct: nums[1],
                recall_pct: nums[2],
                f1_pct: nums[3],
                num_features: nums[4],
                time_seconds: nums[5],
            })
        };
        rows.push(ReportRow {
            dataset: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            seed,
            values,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: RowSeed, acc: f64, k: f64) -> ReportRow {
        ReportRow {
            dataset: "iris".into(),
            algorithm: "rso".into(),
            seed,
            values: Some(RowValues {
                accuracy_pct: acc,
                precision_pct: acc,
                recall_pct: acc,
                f1_pct: acc,
                num_features: k,
                time_seconds: 0.0,
            }),
        }
    }

    #[test]
    fn header_text() {
        let s = to_csv_string(&[]);
        assert_eq!(
            s,
            "dataset,algorithm,seed,accuracy_pct,precision_pct,recall_pct,f1_pct,num_features,time_seconds\n"
        );
    }

    #[test]
    fn means_skip_failures() {
        let mut failed = row(RowSeed::Seed(3), 0.0, 0.0);
        failed.values = None;
        let rows = vec![
            row(RowSeed::Seed(1), 90.0, 2.0),
            row(RowSeed::Seed(2), 100.0, 3.0),
            failed,
        ];
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 1);
        let v = agg[0].values.unwrap();
        assert_eq!(v.accuracy_pct, 95.0);
        assert_eq!(v.num_features, 2.5);
    }

    #[test]
    fn round_trip_with_failure_and_quoting() {
        let mut failed = row(RowSeed::Seed(3), 0.0, 0.0);
        failed.values = None;
        failed.dataset = "odd,name".into();
        let rows = vec![
            row(RowSeed::Seed(1), 93.333333, 4.0),
            failed,
            row(RowSeed::Mean, 93.3333, 2.5),
        ];
        let back = parse_csv(&to_csv_string(&rows)).unwrap();
        let want: Vec<_> = rows.iter().map(ReportRow::quantized).collect();
        assert_eq!(back, want);
        assert!(to_csv_string(&rows).contains("iris,rso,1,93.33,93.33,93.33,93.33,4,0.0000"));
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(matches!(
            parse_csv("a,b\n1,2\n"),
            Err(ReportError::Header(_))
        ));
    }

    #[test]
    fn markdown_has_a_line_per_row() {
        let md = to_markdown(&[row(RowSeed::Seed(1), 50.0, 1.0)]);
        assert_eq!(md.lines().count(), 3);
        assert!(md.starts_with("| dataset | algorithm |"));
    }
}
