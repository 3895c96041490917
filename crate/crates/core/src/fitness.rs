//! Fitness oracles shared by every optimizer.
//!
//! The objective is `accuracy − w · (selected / total)`: accuracy first,
//! subset size as a small penalty. Oracles memoize by exact mask, so the
//! number of distinct masks scored is also the number of classifier runs.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use crate::classify::{self, ClassifyError, Metrics};
use crate::data::{self, DataError, SplitDataset};
use crate::mask::FeatureMask;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessValue {
    pub accuracy: f64,
    pub num_features: usize,
    pub scalar: f64,
}

impl FitnessValue {
    pub fn new(accuracy: f64, num_features: usize, n_features: usize, w: f64) -> Self {
        Self {
            accuracy,
            num_features,
            scalar: accuracy - w * (num_features as f64 / n_features as f64),
        }
    }
}

/// A scored mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub mask: FeatureMask,
    pub fitness: FitnessValue,
}

impl Candidate {
    /// Total ranking, best first: higher scalar, then fewer features, then
    /// the lexicographically smaller mask.
    pub fn rank(&self, other: &Candidate) -> Ordering {
        other
            .fitness
            .scalar
            .total_cmp(&self.fitness.scalar)
            .then(self.fitness.num_features.cmp(&other.fitness.num_features))
            .then(self.mask.cmp(&other.mask))
    }

    /// Strict improvement in scalar fitness.
    pub fn improves_on(&self, other: &Candidate) -> bool {
        self.fitness.scalar > other.fitness.scalar
    }
}

/// Something that scores feature masks.
///
/// `evaluate` is only ever called with nonempty masks of length
/// `n_features()`; implementations may panic otherwise.
pub trait Fitness: Sync {
    fn n_features(&self) -> usize;

    fn evaluate(&self, mask: &FeatureMask) -> FitnessValue;

    /// Best attainable scalar; reaching it ends a search early.
    fn ceiling(&self) -> f64;

    /// Distinct masks scored so far (cache misses).
    fn evaluations(&self) -> usize;

    fn candidate(&self, mask: FeatureMask) -> Candidate {
        let fitness = self.evaluate(&mask);
        Candidate { mask, fitness }
    }
}

/// Mask-keyed memo table with hit accounting.
#[derive(Debug, Default)]
pub struct FitnessCache<V> {
    entries: Mutex<HashMap<FeatureMask, V>>,
    hits: AtomicUsize,
}

impl<V: Clone> FitnessCache<V> {
    pub fn new() -> Self {
        Self {
            entries: Mutex::new(HashMap::new()),
            hits: AtomicUsize::new(0),
        }
    }

    /// Cached value or `compute(mask)`. Two threads racing on the same
    /// fresh mask may both compute it; the value is deterministic, so only
    /// the first insert is kept.
    pub fn get_or_insert_with(&self, mask: &FeatureMask, compute: impl FnOnce() -> V) -> V {
        if let Some(v) = self.entries.lock().unwrap().get(mask) {
            self.hits.fetch_add(1, AtomicOrdering::Relaxed);
            return v.clone();
        }
        let v = compute();
        self.entries
            .lock()
            .unwrap()
            .entry(mask.clone())
            .or_insert(v)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> usize {
        self.hits.load(AtomicOrdering::Relaxed)
    }

    pub fn clear(&self) {
        self.entries.lock().unwrap().clear();
        self.hits.store(0, AtomicOrdering::Relaxed);
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FitnessError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("feature weight {0} outside [0, 1)")]
    InvalidWeight(f64),
}

#[derive(Debug, Clone, Copy)]
struct WrapperEntry {
    fitness: FitnessValue,
    metrics: Metrics,
}

/// KNN holdout accuracy on the projected split.
pub struct WrapperFitness<'a> {
    data: &'a SplitDataset,
    knn_k: usize,
    w: f64,
    cache: FitnessCache<WrapperEntry>,
}

impl<'a> WrapperFitness<'a> {
    pub fn new(data: &'a SplitDataset, knn_k: usize, w: f64) -> Result<Self, FitnessError> {
        if !(0.0..1.0).contains(&w) {
            return Err(FitnessError::InvalidWeight(w));
        }
        if knn_k == 0 {
            return Err(ClassifyError::ZeroK.into());
        }
        if knn_k > data.train.n_instances() {
            return Err(ClassifyError::KTooLarge {
                k: knn_k,
                train: data.train.n_instances(),
            }
            .into());
        }
        Ok(Self {
            data,
            knn_k,
            w,
            cache: FitnessCache::new(),
        })
    }

    pub fn data(&self) -> &SplitDataset {
        self.data
    }

    pub fn weight(&self) -> f64 {
        self.w
    }

    pub fn cache_hits(&self) -> usize {
        self.cache.hits()
    }

    fn entry(&self, mask: &FeatureMask) -> Result<WrapperEntry, FitnessError> {
        if mask.is_blank() {
            return Err(DataError::EmptyMask.into());
        }
        if let Some(e) = self.cache.entries.lock().unwrap().get(mask) {
            self.cache.hits.fetch_add(1, AtomicOrdering::Relaxed);
            return Ok(*e);
        }
        let (train, test) = data::project_split(self.data, mask)?;
        let (_, metrics) = classify::evaluate(&train, &test, self.knn_k)?;
        let fitness = FitnessValue::new(metrics.accuracy, mask.count_ones(), mask.len(), self.w);
        let e = WrapperEntry { fitness, metrics };
        Ok(self.cache.get_or_insert_with(mask, || e))
    }

    /// Scores a mask, rejecting empty ones.
    pub fn score(&self, mask: &FeatureMask) -> Result<FitnessValue, FitnessError> {
        self.entry(mask).map(|e| e.fitness)
    }

    /// Full classification metrics for a mask (memoized with the score).
    pub fn metrics(&self, mask: &FeatureMask) -> Result<Metrics, FitnessError> {
        self.entry(mask).map(|e| e.metrics)
    }
}

impl Fitness for WrapperFitness<'_> {
    fn n_features(&self) -> usize {
        self.data.n_attributes()
    }

    fn evaluate(&self, mask: &FeatureMask) -> FitnessValue {
        self.score(mask)
            .unwrap_or_else(|e| panic!("wrapper fitness on mask {mask}: {e}"))
    }

    /// Perfect accuracy with a single attribute.
    fn ceiling(&self) -> f64 {
        1.0 - self.w / self.n_features() as f64
    }

    fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

/// One-shot wrapper evaluation without a persistent cache.
pub fn wrapper_fitness(
    mask: &FeatureMask,
    data: &SplitDataset,
    knn_k: usize,
    w: f64,
) -> Result<FitnessValue, FitnessError> {
    WrapperFitness::new(data, knn_k, w)?.score(mask)
}

/// Fitness from an arbitrary accuracy-like function of the mask; used for
/// synthetic landscapes.
pub struct FnFitness<F> {
    n: usize,
    w: f64,
    ceiling: f64,
    f: F,
    cache: FitnessCache<FitnessValue>,
}

impl<F> FnFitness<F>
where
    F: Fn(&FeatureMask) -> f64 + Sync,
{
    /// `w = 0`, ceiling 1.
    pub fn new(n: usize, f: F) -> Self {
        Self::with_weight(n, 0.0, f)
    }

    pub fn with_weight(n: usize, w: f64, f: F) -> Self {
        Self {
            n,
            w,
            ceiling: 1.0 - w / n as f64,
            f,
            cache: FitnessCache::new(),
        }
    }

    pub fn with_ceiling(mut self, ceiling: f64) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn cache_hits(&self) -> usize {
        self.cache.hits()
    }
}

impl<F> Fitness for FnFitness<F>
where
    F: Fn(&FeatureMask) -> f64 + Sync,
{
    fn n_features(&self) -> usize {
        self.n
    }

    fn evaluate(&self, mask: &FeatureMask) -> FitnessValue {
        assert!(!mask.is_blank(), "fitness of an empty mask");
        assert_eq!(mask.len(), self.n, "mask length mismatch");
        self.cache.get_or_insert_with(mask, || {
            FitnessValue::new((self.f)(mask), mask.count_ones(), self.n, self.w)
        })
    }

    fn ceiling(&self) -> f64 {
        self.ceiling
    }

    fn evaluations(&self) -> usize {
        self.cache.len()
    }
}
