//! Types shared by every optimizer: run results, execution mode and the
//! per-bee random streams that make parallel runs reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::Metrics;
use crate::fitness::FitnessValue;
use crate::mask::FeatureMask;

/// Whether independent bees of one colony step run on the rayon pool.
/// Both modes produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Metrics of the final mask on the held-out partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub metrics: Metrics,
    pub num_features: usize,
    /// Wall time of the optimizer loop only.
    pub time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerResult {
    pub best_mask: FeatureMask,
    pub fitness: FitnessValue,
    pub report: EvalReport,
    /// Best scalar fitness after each iteration; never decreases.
    pub trajectory: Vec<f64>,
    /// Distinct masks scored (classifier runs).
    pub evaluations: usize,
    pub iterations: usize,
}

impl OptimizerResult {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &OptimizerResult) -> bool {
        let mut a = self.clone();
        a.report.time_seconds = other.report.time_seconds;
        &a == other
    }
}

/// Random stream for one `(iteration, bee)` pair of a seeded run.
///
/// Streams are disjoint ChaCha8 sequences of the same key, so results do
/// not depend on which thread runs which bee.
pub fn stream_rng(seed: u64, iteration: usize, bee: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64 + 1) << 32) | (bee as u64 & 0xFFFF_FFFF));
    rng
}

/// Stream for work that happens before the first iteration.
pub fn setup_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_repeatable() {
        let a: u64 = stream_rng(7, 0, 0).random();
        let b: u64 = stream_rng(7, 0, 1).random();
        let c: u64 = stream_rng(7, 1, 0).random();
        let s: u64 = setup_rng(7).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, s);
        assert_eq!(a, stream_rng(7, 0, 0).random::<u64>());
    }
}
