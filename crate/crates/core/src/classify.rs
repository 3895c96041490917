//! Brute-force k-nearest-neighbour classification and the evaluation
//! metrics reported for every optimizer run.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::data::Dataset;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("k = {k} exceeds training size {train}")]
    KTooLarge { k: usize, train: usize },
    #[error("k must be positive")]
    ZeroK,
    #[error("attribute count mismatch: train has {train}, query has {query}")]
    AttributeMismatch { train: usize, query: usize },
    #[error("training set is empty")]
    EmptyTrain,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Majority label among the `k` Euclidean-nearest training rows.
///
/// Distance ties go to the lower row index; vote ties go to the smallest
/// class id among the tied classes.
pub fn knn_predict(train: &Dataset, instance: &[f64], k: usize) -> Result<usize, ClassifyError> {
    if train.n_instances() == 0 {
        return Err(ClassifyError::EmptyTrain);
    }
    if k == 0 {
        return Err(ClassifyError::ZeroK);
    }
    if k > train.n_instances() {
        return Err(ClassifyError::KTooLarge {
            k,
            train: train.n_instances(),
        });
    }
    if instance.len() != train.n_attributes() {
        return Err(ClassifyError::AttributeMismatch {
            train: train.n_attributes(),
            query: instance.len(),
        });
    }
    Ok(predict_unchecked(train, instance, k))
}

fn predict_unchecked(train: &Dataset, instance: &[f64], k: usize) -> usize {
    let mut dists: Vec<(f64, usize)> = train
        .features()
        .iter()
        .enumerate()
        .map(|(i, row)| (squared_distance(row, instance), i))
        .collect();
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, |a, b| neighbour_order(*a, *b));
    }
    let mut votes = vec![0usize; train.n_classes()];
    for &(_, i) in &dists[..k] {
        votes[train.labels()[i]] += 1;
    }
    // max_by returns the last maximum; iterate in reverse so the smallest
    // class id wins ties.
    votes
        .iter()
        .enumerate()
        .rev()
        .max_by(|a, b| a.1.cmp(b.1))
        .map(|(c, _)| c)
        .unwrap_or(0)
}

/// One-vs-rest counts for a single class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ClassCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// `(tp + tn) / total`.
    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.tp + self.tn + self.fp + self.fn_)
    }

    fn involved(&self) -> bool {
        self.tp + self.fp + self.fn_ > 0
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Per-class one-vs-rest confusion counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub per_class: Vec<ClassCounts>,
    pub total: usize,
    pub correct: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(truth: &[usize], predicted: &[usize], n_classes: usize) -> Self {
        assert_eq!(truth.len(), predicted.len(), "prediction count mismatch");
        let total = truth.len();
        let mut per_class = vec![ClassCounts::default(); n_classes];
        let mut correct = 0;
        for (&t, &p) in truth.iter().zip(predicted) {
            if t == p {
                correct += 1;
                per_class[t].tp += 1;
            } else {
                per_class[p].fp += 1;
                per_class[t].fn_ += 1;
            }
        }
        for c in per_class.iter_mut() {
            c.tn = total - c.tp - c.fp - c.fn_;
        }
        Self {
            per_class,
            total,
            correct,
        }
    }

    /// Accuracy, precision, recall and F1.
    ///
    /// With exactly two classes in the vocabulary, precision and recall are
    /// those of the positive class (id 1). Otherwise they are macro averages
    /// over every class that occurs in the truth or the predictions. F1 is
    /// always the harmonic mean of the reported precision and recall.
    pub fn metrics(&self) -> Metrics {
        let accuracy = ratio(self.correct, self.total);
        let (precision, recall) = if self.per_class.len() == 2 {
            let pos = &self.per_class[1];
            (pos.precision(), pos.recall())
        } else {
            let involved: Vec<&ClassCounts> =
                self.per_class.iter().filter(|c| c.involved()).collect();
            if involved.is_empty() {
                (0.0, 0.0)
            } else {
                let n = involved.len() as f64;
                (
                    involved.iter().map(|c| c.precision()).sum::<f64>() / n,
                    involved.iter().map(|c| c.recall()).sum::<f64>() / n,
                )
            }
        };
        Metrics {
            accuracy,
            precision,
            recall,
            f1: f1_score(precision, recall),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Predicts every test row with [`knn_predict`] and scores the result.
pub fn evaluate(
    train: &Dataset,
    test: &Dataset,
    k: usize,
) -> Result<(ConfusionCounts, Metrics), ClassifyError> {
    let predicted = predict_all(train, test, k)?;
    let counts = ConfusionCounts::from_predictions(test.labels(), &predicted, train.n_classes());
    let metrics = counts.metrics();
    Ok((counts, metrics))
}

/// Predictions for every row of `test`, in row order.
pub fn predict_all(train: &Dataset, test: &Dataset, k: usize) -> Result<Vec<usize>, ClassifyError> {
    if train.n_instances() == 0 {
        return Err(ClassifyError::EmptyTrain);
    }
    if train.n_attributes() != test.n_attributes() {
        return Err(ClassifyError::AttributeMismatch {
            train: train.n_attributes(),
            query: test.n_attributes(),
        });
    }
    if k == 0 {
        return Err(ClassifyError::ZeroK);
    }
    if k > train.n_instances() {
        return Err(ClassifyError::KTooLarge {
            k,
            train: train.n_instances(),
        });
    }
    // Small test sets are cheaper serially than through the pool.
    if test.n_instances() * train.n_instances() < 50_000 {
        Ok(test
            .features()
            .iter()
            .map(|row| predict_unchecked(train, row, k))
            .collect())
    } else {
        Ok(test
            .features()
            .par_iter()
            .map(|row| predict_unchecked(train, row, k))
            .collect())
    }
}

/// Neighbour ranking: by distance, then by lower row index.
pub fn neighbour_order(a: (f64, usize), b: (f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Dataset {
        let width = rows[0].len();
        Dataset::new(
            "k",
            rows,
            labels,
            (0..width).map(|i| format!("a{i}")).collect(),
            (0..classes).map(|i| format!("c{i}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exact_match_wins_at_k1() {
        let train = ds(
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]],
            vec![0, 1, 0],
            2,
        );
        assert_eq!(knn_predict(&train, &[1.0, 1.0], 1).unwrap(), 1);
    }

    #[test]
    fn majority_vote() {
        let train = ds(
            vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0]],
            vec![0, 0, 1, 1],
            2,
        );
        assert_eq!(knn_predict(&train, &[0.0], 3).unwrap(), 0);
    }

    #[test]
    fn six_point_fixture_by_hand() {
        // Query (1, 1). Squared distances:
        //   row0 (0,0) A: 2    row1 (1,2) B: 1    row2 (3,1) B: 4
        //   row3 (2,2) A: 2    row4 (0,3) B: 5    row5 (1,0) A: 1
        // Sorted by (distance, index): row1, row5, row0, row3, ...
        // The three nearest are row1 B, row5 A, row0 A -> A.
        let train = ds(
            vec![
                vec![0.0, 0.0],
                vec![1.0, 2.0],
                vec![3.0, 1.0],
                vec![2.0, 2.0],
                vec![0.0, 3.0],
                vec![1.0, 0.0],
            ],
            vec![0, 1, 1, 0, 1, 0],
            2,
        );
        assert_eq!(knn_predict(&train, &[1.0, 1.0], 3).unwrap(), 0);
        // k = 4 adds row3 (A); k = 2 ties 1-1 and the smaller id (A) wins.
        assert_eq!(knn_predict(&train, &[1.0, 1.0], 4).unwrap(), 0);
        assert_eq!(knn_predict(&train, &[1.0, 1.0], 2).unwrap(), 0);
    }

    #[test]
    fn distance_tie_prefers_lower_index() {
        let train = ds(vec![vec![-1.0], vec![1.0]], vec![1, 0], 2);
        assert_eq!(knn_predict(&train, &[0.0], 1).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let train = ds(vec![vec![0.0], vec![1.0]], vec![0, 1], 2);
        assert!(matches!(
            knn_predict(&train, &[0.0], 3),
            Err(ClassifyError::KTooLarge { .. })
        ));
        assert!(matches!(
            knn_predict(&train, &[0.0, 1.0], 1),
            Err(ClassifyError::AttributeMismatch { .. })
        ));
        let wide = ds(vec![vec![0.0, 0.0], vec![1.0, 1.0]], vec![0, 1], 2);
        assert!(matches!(
            evaluate(&train, &wide, 1),
            Err(ClassifyError::AttributeMismatch { .. })
        ));
        let empty = train.select_rows(&[]);
        assert!(matches!(
            evaluate(&empty, &train, 1),
            Err(ClassifyError::EmptyTrain)
        ));
    }

    #[test]
    fn perfect_classifier() {
        let train = ds(vec![vec![0.0], vec![10.0], vec![20.0]], vec![0, 1, 2], 3);
        let (_, m) = evaluate(&train, &train, 1).unwrap();
        assert_eq!(
            m,
            Metrics {
                accuracy: 1.0,
                precision: 1.0,
                recall: 1.0,
                f1: 1.0
            }
        );
    }

    #[test]
    fn binary_confusion_by_hand() {
        // TP=3, FP=1, TN=4, FN=2 on the positive class (id 1).
        let truth = [1, 1, 1, 0, 0, 0, 0, 0, 1, 1];
        let pred = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        let c = ConfusionCounts::from_predictions(&truth, &pred, 2);
        assert_eq!(
            c.per_class[1],
            ClassCounts {
                tp: 3,
                fp: 1,
                tn: 4,
                fn_: 2
            }
        );
        let m = c.metrics();
        assert!((m.accuracy - 0.7).abs() < 1e-12);
        assert!((m.precision - 0.75).abs() < 1e-12);
        assert!((m.recall - 0.6).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn class_never_predicted_has_zero_precision() {
        let truth = [0, 1, 2, 2];
        let pred = [0, 1, 1, 1];
        let c = ConfusionCounts::from_predictions(&truth, &pred, 3);
        assert_eq!(c.per_class[2].precision(), 0.0);
        let m = c.metrics();
        assert!(m.precision.is_finite() && m.recall.is_finite() && m.f1.is_finite());
        // precision: (1 + 1/3 + 0) / 3, recall: (1 + 1 + 0) / 3
        assert!((m.precision - 4.0 / 9.0).abs() < 1e-12);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn counts_sum_to_test_size() {
        let truth = [0, 1, 2, 2, 1, 0, 3];
        let pred = [0, 2, 2, 1, 1, 3, 3];
        let c = ConfusionCounts::from_predictions(&truth, &pred, 4);
        for cc in &c.per_class {
            assert_eq!(cc.tp + cc.fp + cc.tn + cc.fn_, truth.len());
        }
        assert_eq!(c.per_class.iter().map(|cc| cc.tp).sum::<usize>(), c.correct);
    }
}
