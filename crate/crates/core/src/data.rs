//! Tabular classification datasets: CSV loading, min-max scaling,
//! stratified holdout splits and column projection by feature mask.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mask::FeatureMask;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("malformed row at line {line}: expected {expected} columns, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("dataset has a single class")]
    SingleClassDataset,
    #[error("dataset has no instances")]
    EmptyDataset,
    #[error("dataset has no attribute columns")]
    NoAttributes,
    #[error("label column {0} not found")]
    LabelColumnNotFound(String),
    #[error("feature matrix has {rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("row {row} has {found} attributes, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("feature mask selects no attributes")]
    EmptyMask,
    #[error("mask length {mask} does not match attribute count {attributes}")]
    MaskLength { mask: usize, attributes: usize },
    #[error("train fraction {0} outside (0, 1)")]
    InvalidFraction(f64),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Numeric attribute matrix with integer-coded class labels.
///
/// Labels index into `class_names`; codes follow first appearance in the
/// source file. Views produced by [`stratified_split`] and [`project`] keep
/// the parent's full class list so codes stay comparable across partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    attribute_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, enforcing the loader invariants: matching row and
    /// label counts, at least one attribute and at least two distinct labels.
    pub fn new(
        name: impl Into<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        attribute_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if features.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        if features.len() != labels.len() {
            return Err(DataError::LengthMismatch {
                rows: features.len(),
                labels: labels.len(),
            });
        }
        let width = attribute_names.len();
        if width == 0 {
            return Err(DataError::NoAttributes);
        }
        for (row, values) in features.iter().enumerate() {
            if values.len() != width {
                return Err(DataError::RaggedMatrix {
                    row,
                    expected: width,
                    found: values.len(),
                });
            }
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(DataError::LabelOutOfRange {
                label,
                classes: class_names.len(),
            });
        }
        let mut seen = vec![false; class_names.len()];
        labels.iter().for_each(|&l| seen[l] = true);
        if seen.iter().filter(|&&s| s).count() < 2 {
            return Err(DataError::SingleClassDataset);
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
            attribute_names,
            class_names,
        })
    }

    /// Subset of rows, in the given order. Skips class-count validation.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: rows.iter().map(|&r| self.features[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            attribute_names: self.attribute_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    /// Size of the class vocabulary (not necessarily all present here).
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.features.iter().map(move |r| r[j])
    }
}

/// Which CSV column carries the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, a zero-based index, or a header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "last" => LabelColumn::Last,
            _ => match s.parse::<usize>() {
                Ok(i) => LabelColumn::Index(i),
                Err(_) => LabelColumn::Name(s.to_string()),
            },
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub label: LabelColumn,
    /// `None` auto-detects the header row.
    pub header: Option<bool>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "?" | "NA" | "na" | "N/A" | "null")
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads a comma-separated file with the label in the last column and an
/// auto-detected header.
pub fn load_csv(path: impl AsRef<Path>, label: LabelColumn) -> Result<Dataset, DataError> {
    load_csv_with(
        path,
        &CsvOptions {
            label,
            header: None,
        },
    )
}

pub fn load_csv_with(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(DataError::FileNotFound(path.to_path_buf()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = std::fs::read_to_string(path)?;
    parse_csv(&name, &text, opts)
}

/// Parses CSV text already in memory; see [`load_csv`].
pub fn parse_csv(name: &str, text: &str, opts: &CsvOptions) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push(record.iter().map(str::to_string).collect());
        lines.push(line);
    }
    if rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let width = rows[0].len();
    for (row, &line) in rows.iter().zip(&lines) {
        if row.len() != width {
            return Err(DataError::MalformedRow {
                line,
                expected: width,
                found: row.len(),
            });
        }
    }

    let label_idx = match &opts.label {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => return Err(DataError::LabelColumnNotFound(i.to_string())),
        LabelColumn::Name(n) => rows[0]
            .iter()
            .position(|c| c == n)
            .ok_or_else(|| DataError::LabelColumnNotFound(n.clone()))?,
    };
    let attr_cols: Vec<usize> = (0..width).filter(|&c| c != label_idx).collect();
    if attr_cols.is_empty() {
        return Err(DataError::NoAttributes);
    }

    // Column kinds are decided from the rows after the first, so the first
    // row can be tested as a header candidate.
    let body_for_typing = if rows.len() > 1 {
        &rows[1..]
    } else {
        &rows[..]
    };
    let numeric_in_body: Vec<bool> = attr_cols
        .iter()
        .map(|&c| column_is_numeric(body_for_typing.iter().map(|r| r[c].as_str())))
        .collect();

    let has_header = match (opts.header, &opts.label) {
        (Some(h), _) => h,
        (None, LabelColumn::Name(_)) => true,
        // A lone row with no numeric attribute cell is a header without data.
        (None, _) if rows.len() == 1 => attr_cols
            .iter()
            .all(|&c| parse_number(&rows[0][c]).is_none()),
        (None, _) => attr_cols
            .iter()
            .zip(&numeric_in_body)
            .any(|(&c, &numeric)| {
                let cell = rows[0][c].as_str();
                numeric && !is_missing(cell) && parse_number(cell).is_none()
            }),
    };

    let (attribute_names, body) = if has_header {
        let names = attr_cols.iter().map(|&c| rows[0][c].clone()).collect();
        (names, &rows[1..])
    } else {
        let names = attr_cols.iter().map(|&c| format!("x{c}")).collect();
        (names, &rows[..])
    };
    if body.is_empty() {
        return Err(DataError::EmptyDataset);
    }

    let mut features = vec![Vec::with_capacity(attr_cols.len()); body.len()];
    for &c in &attr_cols {
        let cells: Vec<&str> = body.iter().map(|r| r[c].as_str()).collect();
        let values = if column_is_numeric(cells.iter().copied()) {
            impute_numeric(&cells)
        } else {
            encode_categorical(&cells)
        };
        for (row, v) in features.iter_mut().zip(values) {
            row.push(v);
        }
    }

    let mut class_names: Vec<String> = Vec::new();
    let mut class_index: HashMap<&str, usize> = HashMap::new();
    let labels = body
        .iter()
        .map(|r| {
            let raw = r[label_idx].as_str();
            *class_index.entry(raw).or_insert_with(|| {
                class_names.push(raw.to_string());
                class_names.len() - 1
            })
        })
        .collect();

    Dataset::new(name, features, labels, attribute_names, class_names)
}

/// A column is numeric when at least half of its non-missing cells parse.
fn column_is_numeric<'a>(cells: impl Iterator<Item = &'a str>) -> bool {
    let (mut parsed, mut present) = (0usize, 0usize);
    for cell in cells {
        if is_missing(cell) {
            continue;
        }
        present += 1;
        if parse_number(cell).is_some() {
            parsed += 1;
        }
    }
    parsed > 0 && 2 * parsed >= present
}

fn impute_numeric(cells: &[&str]) -> Vec<f64> {
    let parsed: Vec<Option<f64>> = cells.iter().map(|c| parse_number(c)).collect();
    let known: Vec<f64> = parsed.iter().flatten().copied().collect();
    let mean = if known.is_empty() {
        0.0
    } else {
        known.iter().sum::<f64>() / known.len() as f64
    };
    parsed.into_iter().map(|v| v.unwrap_or(mean)).collect()
}

fn encode_categorical(cells: &[&str]) -> Vec<f64> {
    let mut codes: HashMap<&str, usize> = HashMap::new();
    let mut counts: Vec<usize> = Vec::new();
    let encoded: Vec<Option<usize>> = cells
        .iter()
        .map(|&c| {
            if is_missing(c) {
                return None;
            }
            let next = codes.len();
            let code = *codes.entry(c).or_insert(next);
            if code == counts.len() {
                counts.push(0);
            }
            counts[code] += 1;
            Some(code)
        })
        .collect();
    // Mode; ties go to the earliest-appearing category.
    let mode = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(code, _)| code)
        .unwrap_or(0);
    encoded
        .into_iter()
        .map(|c| c.unwrap_or(mode) as f64)
        .collect()
}

/// Rescales every attribute to `[0, 1]`; constant columns become 0.
pub fn min_max_normalize(d: &Dataset) -> Dataset {
    let mut out = d.clone();
    for j in 0..d.n_attributes() {
        let (lo, hi) = d
            .column(j)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi - lo;
        for row in out.features.iter_mut() {
            row[j] = if span > 0.0 {
                (row[j] - lo) / span
            } else {
                0.0
            };
        }
    }
    out
}

/// Stratified holdout partition of one dataset.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: Dataset,
    pub test: Dataset,
    /// Source row indices of `train`, ascending.
    pub train_rows: Vec<usize>,
    /// Source row indices of `test`, ascending.
    pub test_rows: Vec<usize>,
    pub split_seed: u64,
    pub train_fraction: f64,
    /// Classes too small to stratify (their single instance went to train).
    pub warnings: Vec<String>,
}

impl SplitDataset {
    pub fn n_attributes(&self) -> usize {
        self.train.n_attributes()
    }

    pub fn name(&self) -> &str {
        &self.train.name
    }
}

/// Per-class proportional holdout split, deterministic in `seed`.
///
/// Each class with `c ≥ 2` instances sends `round(c · train_fraction)`
/// instances to train, clamped to `[1, c − 1]`. A singleton class goes to
/// train and a warning is recorded.
pub fn stratified_split(
    d: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitDataset, DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::InvalidFraction(train_fraction));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); d.n_classes()];
    for (i, &l) in d.labels().iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    let mut warnings = Vec::new();
    for (class, mut members) in by_class.into_iter().enumerate() {
        match members.len() {
            0 => continue,
            1 => {
                warnings.push(format!(
                    "class {:?} has a single instance; placed in train",
                    d.class_names()[class]
                ));
                train_rows.push(members[0]);
            }
            n => {
                members.shuffle(&mut rng);
                let k = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
                train_rows.extend_from_slice(&members[..k]);
                test_rows.extend_from_slice(&members[k..]);
            }
        }
    }
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok(SplitDataset {
        train: d.select_rows(&train_rows),
        test: d.select_rows(&test_rows),
        train_rows,
        test_rows,
        split_seed: seed,
        train_fraction,
        warnings,
    })
}

/// Keeps exactly the columns selected by `mask`.
pub fn project(d: &Dataset, mask: &FeatureMask) -> Result<Dataset, DataError> {
    if mask.len() != d.n_attributes() {
        return Err(DataError::MaskLength {
            mask: mask.len(),
            attributes: d.n_attributes(),
        });
    }
    if mask.is_blank() {
        return Err(DataError::EmptyMask);
    }
    let cols = mask.selected();
    Ok(Dataset {
        name: d.name.clone(),
        features: d
            .features
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect(),
        labels: d.labels.clone(),
        attribute_names: cols.iter().map(|&c| d.attribute_names[c].clone()).collect(),
        class_names: d.class_names.clone(),
    })
}

/// Projects both partitions of a split.
pub fn project_split(
    s: &SplitDataset,
    mask: &FeatureMask,
) -> Result<(Dataset, Dataset), DataError> {
    Ok((project(&s.train, mask)?, project(&s.test, mask)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(text: &str) -> Result<Dataset, DataError> {
        parse_csv("fixture", text, &CsvOptions::default())
    }

    fn single_column(values: &[f64], labels: &[usize]) -> Dataset {
        Dataset::new(
            "col",
            values.iter().map(|&v| vec![v]).collect(),
            labels.to_vec(),
            vec!["a".into()],
            vec!["p".into(), "q".into()],
        )
        .unwrap()
    }

    #[test]
    fn header_is_detected_and_labels_coded_by_appearance() {
        let d = csv("a,b,class\n1,2,yes\n3,4,no\n5,6,yes\n").unwrap();
        assert_eq!(d.attribute_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.n_instances(), 3);
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_eq!(d.class_names(), &["yes".to_string(), "no".to_string()]);
    }

    #[test]
    fn headerless_file_keeps_first_row() {
        let d = csv("1,2,0\n3,4,1\n").unwrap();
        assert_eq!(d.n_instances(), 2);
        assert_eq!(d.attribute_names(), &["x0".to_string(), "x1".to_string()]);
    }

    #[test]
    fn unparseable_numeric_cell_gets_column_mean() {
        let d = csv("a,b,class\n1,10,x\n?,20,y\n4,oops,x\n").unwrap();
        assert_eq!(d.row(1)[0], 2.5);
        assert_eq!(d.row(2)[1], 15.0);
    }

    #[test]
    fn categorical_column_is_coded_and_mode_imputed() {
        let d = csv("c,n,class\nred,1,a\nblue,2,b\nred,3,a\n?,4,b\n").unwrap();
        let col: Vec<f64> = d.column(0).collect();
        assert_eq!(col, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn label_by_index_and_name() {
        let by_idx = parse_csv(
            "f",
            "1,a,2\n3,b,4\n",
            &CsvOptions {
                label: LabelColumn::Index(1),
                header: None,
            },
        )
        .unwrap();
        assert_eq!(by_idx.n_attributes(), 2);
        assert_eq!(by_idx.row(1), &[3.0, 4.0]);

        let by_name = parse_csv(
            "f",
            "kind,v\nx,1\ny,2\n",
            &CsvOptions {
                label: LabelColumn::Name("kind".into()),
                header: None,
            },
        )
        .unwrap();
        assert_eq!(by_name.attribute_names(), &["v".to_string()]);
        assert!(matches!(
            parse_csv(
                "f",
                "kind,v\nx,1\n",
                &CsvOptions {
                    label: LabelColumn::Name("nope".into()),
                    header: None
                }
            ),
            Err(DataError::LabelColumnNotFound(_))
        ));
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            csv("a,b\n1,x\n2,x\n"),
            Err(DataError::SingleClassDataset)
        ));
        assert!(matches!(csv(""), Err(DataError::EmptyDataset)));
        assert!(matches!(csv("a,class\n"), Err(DataError::EmptyDataset)));
        assert!(matches!(
            csv("1,2,a\n3,b\n"),
            Err(DataError::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            load_csv("/definitely/not/here.csv", LabelColumn::Last),
            Err(DataError::FileNotFound(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let d = single_column(&[2.0, 4.0, 6.0], &[0, 1, 0]);
        assert_eq!(
            min_max_normalize(&d).column(0).collect::<Vec<_>>(),
            vec![0.0, 0.5, 1.0]
        );
        let d = single_column(&[5.0, 5.0, 5.0], &[0, 1, 0]);
        assert_eq!(
            min_max_normalize(&d).column(0).collect::<Vec<_>>(),
            vec![0.0; 3]
        );
        let d = single_column(&[-1.0, 0.0, 3.0], &[0, 1, 0]);
        assert_eq!(
            min_max_normalize(&d).column(0).collect::<Vec<_>>(),
            vec![0.0, 0.25, 1.0]
        );
    }

    #[test]
    fn split_ten_instances_four_one_per_class() {
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let feats = (0..10).map(|i| vec![i as f64]).collect();
        let d = Dataset::new(
            "t",
            feats,
            labels,
            vec!["a".into()],
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        let s = stratified_split(&d, 0.8, 42).unwrap();
        assert_eq!(s.train.n_instances(), 8);
        assert_eq!(s.test.n_instances(), 2);
        for class in 0..2 {
            assert_eq!(s.train.labels().iter().filter(|&&l| l == class).count(), 4);
            assert_eq!(s.test.labels().iter().filter(|&&l| l == class).count(), 1);
        }
        let again = stratified_split(&d, 0.8, 42).unwrap();
        assert_eq!(s.train_rows, again.train_rows);
    }

    #[test]
    fn singleton_class_goes_to_train_with_warning() {
        let d = Dataset::new(
            "t",
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0, 0, 0, 1],
            vec!["a".into()],
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        let s = stratified_split(&d, 0.5, 1).unwrap();
        assert!(s.train_rows.contains(&3));
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let d = single_column(&[1.0, 2.0, 3.0, 4.0], &[0, 1, 0, 1]);
        assert!(matches!(
            stratified_split(&d, 1.0, 0),
            Err(DataError::InvalidFraction(_))
        ));
        assert!(matches!(
            stratified_split(&d, 0.0, 0),
            Err(DataError::InvalidFraction(_))
        ));
    }

    #[test]
    fn project_examples() {
        let d = Dataset::new(
            "p",
            vec![vec![1.0, 2.0, 3.0, 4.0], vec![5.0, 6.0, 7.0, 8.0]],
            vec![0, 1],
            (0..4).map(|i| format!("a{i}")).collect(),
            vec!["p".into(), "q".into()],
        )
        .unwrap();
        assert_eq!(project(&d, &FeatureMask::ones(4)).unwrap(), d);
        let p = project(&d, &"0101".parse().unwrap()).unwrap();
        assert_eq!(p.features(), &[vec![2.0, 4.0], vec![6.0, 8.0]]);
        assert_eq!(p.attribute_names(), &["a1".to_string(), "a3".to_string()]);
        assert!(matches!(
            project(&d, &FeatureMask::zeros(4)),
            Err(DataError::EmptyMask)
        ));
        assert!(matches!(
            project(&d, &FeatureMask::ones(3)),
            Err(DataError::MaskLength { .. })
        ));
    }
}
