//! Binary Bee Swarm Optimization.
//!
//! Each colony step inserts the reference into the taboo list, spreads the
//! bees over a determined search region around it, lets every bee improve
//! its starting point, and collects the results in the dance table. The best
//! non-taboo dance entry becomes the next reference. After `chance_max`
//! steps without improvement the colony jumps to a mask far from everything
//! in the taboo list.
//!
//! The per-bee search is pluggable through [`BeeSearch`]: plain BSO uses
//! [`HillClimb`], the reinforced variant in [`crate::rso`] swaps in
//! Q-learning episodes.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::SplitDataset;
use crate::fitness::{Candidate, Fitness, FitnessError, WrapperFitness};
use crate::mask::FeatureMask;
use crate::optimizer::{setup_rng, stream_rng, EvalReport, Execution, OptimizerResult};

/// Random candidates drawn when diversifying.
pub const DIVERSIFICATION_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsoParams {
    /// Search-region spread; distance from the reference is about `n / flip`.
    pub flip: usize,
    /// Non-improving steps tolerated before diversification.
    pub chance_max: usize,
    pub max_iter: usize,
    pub num_bees: usize,
    /// Moves per bee per step.
    pub ls_iter: usize,
    pub seed: u64,
}

impl Default for BsoParams {
    fn default() -> Self {
        Self {
            flip: 5,
            chance_max: 5,
            max_iter: 10,
            num_bees: 8,
            ls_iter: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("{0} must be at least 1")]
    NotPositive(&'static str),
    #[error("{name} = {value} outside [0, 1]")]
    OutOfUnitRange { name: &'static str, value: String },
}

impl BsoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, v) in [
            ("flip", self.flip),
            ("chance_max", self.chance_max),
            ("max_iter", self.max_iter),
            ("num_bees", self.num_bees),
        ] {
            if v == 0 {
                return Err(ParamError::NotPositive(name));
            }
        }
        Ok(())
    }

    /// Upper bound on distinct fitness evaluations for one run.
    pub fn evaluation_budget(&self) -> usize {
        self.max_iter * self.num_bees * (self.ls_iter + 1) + 1
    }
}

/// Bernoulli(0.5) bits, redrawn while empty.
pub fn initial_reference<R: Rng + ?Sized>(n_features: usize, rng: &mut R) -> FeatureMask {
    FeatureMask::random_nonempty(n_features, rng)
}

/// Starting points for `num_bees` bees.
///
/// Bee `k` flips every index `i` with `i % flip == k % flip`. Bees beyond
/// the first `flip` also toggle bit `(k / flip) % n` so that all starting
/// points stay distinct. A result with no bit set gets bit 0 switched on.
pub fn generate_search_region(
    reference: &FeatureMask,
    flip: usize,
    num_bees: usize,
) -> Vec<FeatureMask> {
    assert!(flip >= 1, "flip must be at least 1");
    let n = reference.len();
    (0..num_bees)
        .map(|k| {
            let mut m = reference.clone();
            for i in (k % flip..n).step_by(flip) {
                m.toggle(i);
            }
            if k >= flip && n > 0 {
                m.toggle((k / flip) % n);
            }
            if m.is_blank() && n > 0 {
                m.set(0, true);
            }
            m
        })
        .collect()
}

/// Single-bit-flip hill climbing: `ls_iter` random flips, each kept only if
/// it strictly improves the scalar fitness. Flips that would empty the mask
/// are skipped without evaluation.
pub fn local_search<F: Fitness + ?Sized, R: Rng + ?Sized>(
    start: &FeatureMask,
    fitness: &F,
    ls_iter: usize,
    rng: &mut R,
) -> Candidate {
    let mut current = Candidate {
        mask: start.clone(),
        fitness: fitness.evaluate(start),
    };
    let n = start.len();
    for _ in 0..ls_iter {
        let mut neighbour = current.mask.clone();
        neighbour.toggle(rng.random_range(0..n));
        if neighbour.is_blank() {
            continue;
        }
        let fv = fitness.evaluate(&neighbour);
        let next = Candidate {
            mask: neighbour,
            fitness: fv,
        };
        if next.improves_on(&current) {
            current = next;
        }
    }
    current
}

/// Per-bee improvement procedure run from each search-region point.
pub trait BeeSearch: Sync {
    /// Per-bee side information handed back to [`BeeSearch::merge`].
    type Trace: Send;

    fn search<F: Fitness>(
        &self,
        start: &FeatureMask,
        fitness: &F,
        rng: &mut ChaCha8Rng,
    ) -> (Candidate, Self::Trace);

    /// Folds the traces of one step back into shared state, in bee order.
    fn merge(&mut self, _traces: Vec<Self::Trace>) {}
}

/// Plain BSO local search.
#[derive(Debug, Clone, Copy)]
pub struct HillClimb {
    pub ls_iter: usize,
}

impl BeeSearch for HillClimb {
    type Trace = ();

    fn search<F: Fitness>(
        &self,
        start: &FeatureMask,
        fitness: &F,
        rng: &mut ChaCha8Rng,
    ) -> (Candidate, ()) {
        (local_search(start, fitness, self.ls_iter, rng), ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColonyState {
    pub reference: FeatureMask,
    /// Past references, insertion order, no duplicates.
    pub tab: Vec<FeatureMask>,
    /// This step's bee results, best first.
    pub dance: Vec<Candidate>,
    pub chances_left: usize,
    pub iteration: usize,
    pub best: Candidate,
    /// Steps where every dance entry was taboo and the best one was reused.
    pub taboo_fallbacks: usize,
    pub diversifications: usize,
}

impl ColonyState {
    /// Random initial reference, scored as the first best.
    pub fn new<F: Fitness>(fitness: &F, params: &BsoParams) -> Self {
        let reference = initial_reference(fitness.n_features(), &mut setup_rng(params.seed));
        Self::from_reference(reference, fitness, params)
    }

    pub fn from_reference<F: Fitness>(
        reference: FeatureMask,
        fitness: &F,
        params: &BsoParams,
    ) -> Self {
        let best = fitness.candidate(reference.clone());
        Self {
            reference,
            tab: Vec::new(),
            dance: Vec::new(),
            chances_left: params.chance_max,
            iteration: 0,
            best,
            taboo_fallbacks: 0,
            diversifications: 0,
        }
    }
}

/// The nonempty mask among `samples` random draws whose nearest taboo entry
/// is farthest away (first one wins ties).
pub fn diversify<R: Rng + ?Sized>(
    tab: &[FeatureMask],
    n_features: usize,
    samples: usize,
    rng: &mut R,
) -> FeatureMask {
    let mut best: Option<(usize, FeatureMask)> = None;
    for _ in 0..samples.max(1) {
        let m = FeatureMask::random_nonempty(n_features, rng);
        let d = tab
            .iter()
            .map(|t| t.hamming(&m))
            .min()
            .unwrap_or(n_features);
        if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
            best = Some((d, m));
        }
    }
    best.map(|(_, m)| m).expect("at least one sample")
}

/// One colony iteration.
pub fn bso_step<F: Fitness, S: BeeSearch>(
    state: &mut ColonyState,
    params: &BsoParams,
    fitness: &F,
    search: &mut S,
    exec: Execution,
) {
    if !state.tab.contains(&state.reference) {
        state.tab.push(state.reference.clone());
    }
    let region = generate_search_region(&state.reference, params.flip, params.num_bees);
    let iteration = state.iteration;
    let seed = params.seed;
    let searcher: &S = search;
    let run_bee = |(k, start): (usize, &FeatureMask)| {
        let mut rng = stream_rng(seed, iteration, k);
        searcher.search(start, fitness, &mut rng)
    };
    let results: Vec<(Candidate, S::Trace)> = match exec {
        Execution::Parallel => region.par_iter().enumerate().map(run_bee).collect(),
        Execution::Sequential => region.iter().enumerate().map(run_bee).collect(),
    };
    let (mut dance, traces): (Vec<Candidate>, Vec<S::Trace>) = results.into_iter().unzip();
    search.merge(traces);
    dance.sort_by(|a, b| a.rank(b));

    let top = &dance[0];
    let diversifying = if top.improves_on(&state.best) {
        state.best = top.clone();
        state.chances_left = params.chance_max;
        false
    } else if state.chances_left == 0 {
        true
    } else {
        state.chances_left -= 1;
        false
    };

    state.reference = if diversifying {
        state.chances_left = params.chance_max;
        state.diversifications += 1;
        let mut rng = stream_rng(seed, iteration, params.num_bees);
        diversify(
            &state.tab,
            fitness.n_features(),
            DIVERSIFICATION_SAMPLES,
            &mut rng,
        )
    } else {
        match dance.iter().find(|c| !state.tab.contains(&c.mask)) {
            Some(c) => c.mask.clone(),
            None => {
                state.taboo_fallbacks += 1;
                top.mask.clone()
            }
        }
    };
    state.dance = dance;
    state.iteration += 1;
}

/// Result of a colony run on an arbitrary fitness oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ColonyOutcome {
    pub best: Candidate,
    pub trajectory: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub taboo_fallbacks: usize,
    pub diversifications: usize,
}

/// Runs colony steps until `max_iter` or until the fitness ceiling is hit.
pub fn run_colony<F: Fitness, S: BeeSearch>(
    fitness: &F,
    params: &BsoParams,
    search: &mut S,
    exec: Execution,
) -> ColonyOutcome {
    let mut state = ColonyState::new(fitness, params);
    let mut trajectory = Vec::with_capacity(params.max_iter);
    while state.iteration < params.max_iter {
        bso_step(&mut state, params, fitness, search, exec);
        trajectory.push(state.best.fitness.scalar);
        if state.best.fitness.scalar >= fitness.ceiling() {
            break;
        }
    }
    ColonyOutcome {
        best: state.best,
        trajectory,
        iterations: state.iteration,
        evaluations: fitness.evaluations(),
        taboo_fallbacks: state.taboo_fallbacks,
        diversifications: state.diversifications,
    }
}

/// Plain BSO on any fitness oracle.
pub fn run_bso_with<F: Fitness>(fitness: &F, params: &BsoParams, exec: Execution) -> ColonyOutcome {
    let mut search = HillClimb {
        ls_iter: params.ls_iter,
    };
    run_colony(fitness, params, &mut search, exec)
}

/// Plain BSO wrapper feature selection with a KNN holdout fitness.
pub fn run_bso(
    data: &SplitDataset,
    params: &BsoParams,
    knn_k: usize,
    w: f64,
    exec: Execution,
) -> Result<OptimizerResult, FitnessError> {
    let fitness = WrapperFitness::new(data, knn_k, w)?;
    let start = Instant::now();
    let outcome = run_bso_with(&fitness, params, exec);
    let elapsed = start.elapsed().as_secs_f64();
    finish(&fitness, outcome, elapsed)
}

pub(crate) fn finish(
    fitness: &WrapperFitness<'_>,
    outcome: ColonyOutcome,
    time_seconds: f64,
) -> Result<OptimizerResult, FitnessError> {
    let metrics = fitness.metrics(&outcome.best.mask)?;
    Ok(OptimizerResult {
        report: EvalReport {
            metrics,
            num_features: outcome.best.mask.count_ones(),
            time_seconds,
        },
        best_mask: outcome.best.mask,
        fitness: outcome.best.fitness,
        trajectory: outcome.trajectory,
        evaluations: outcome.evaluations,
        iterations: outcome.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::FnFitness;
    use rand::SeedableRng;

    fn m(s: &str) -> FeatureMask {
        s.parse().unwrap()
    }

    fn popcount(n: usize) -> FnFitness<impl Fn(&FeatureMask) -> f64 + Sync> {
        FnFitness::new(n, move |mask: &FeatureMask| {
            mask.count_ones() as f64 / n as f64
        })
    }

    #[test]
    fn region_example() {
        let r = generate_search_region(&m("000000"), 2, 2);
        assert_eq!(r, vec![m("101010"), m("010101")]);
    }

    #[test]
    fn region_with_large_flip_flips_bit_zero() {
        let r = generate_search_region(&m("0110"), 7, 1);
        assert_eq!(r, vec![m("1110")]);
    }

    #[test]
    fn region_extra_bees_stay_distinct() {
        let reference = m("1011001110");
        let r = generate_search_region(&reference, 5, 8);
        for (i, a) in r.iter().enumerate() {
            for b in &r[i + 1..] {
                assert_ne!(a, b);
            }
            let d = a.hamming(&reference);
            assert!((1..=3).contains(&d), "distance {d}");
        }
    }

    #[test]
    fn region_repairs_empty_masks() {
        // Flipping bits 0 and 2 of 1010 empties it; bit 0 is switched back on.
        let r = generate_search_region(&m("1010"), 2, 1);
        assert_eq!(r, vec![m("1000")]);
    }

    #[test]
    fn initial_reference_is_deterministic() {
        let a = initial_reference(4, &mut setup_rng(11));
        let b = initial_reference(4, &mut setup_rng(11));
        assert_eq!(a, b);
        assert_eq!(initial_reference(1, &mut setup_rng(11)), m("1"));
    }

    #[test]
    fn local_search_stays_at_optimum() {
        let f = popcount(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = local_search(&m("1111"), &f, 20, &mut rng);
        assert_eq!(c.mask, m("1111"));
    }

    #[test]
    fn local_search_zero_iterations_is_identity() {
        let f = popcount(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = local_search(&m("0010"), &f, 0, &mut rng);
        assert_eq!(c.mask, m("0010"));
        assert_eq!(c.fitness.accuracy, 0.25);
    }

    #[test]
    fn constant_fitness_counts_down_then_diversifies() {
        let f = FnFitness::new(6, |_: &FeatureMask| 0.5);
        let params = BsoParams {
            seed: 3,
            ..BsoParams::default()
        };
        let mut state = ColonyState::new(&f, &params);
        let initial_best = state.best.clone();
        let mut search = HillClimb { ls_iter: 3 };
        for step in 1..=params.chance_max {
            bso_step(&mut state, &params, &f, &mut search, Execution::Sequential);
            assert_eq!(state.chances_left, params.chance_max - step);
            assert_eq!(state.diversifications, 0);
        }
        bso_step(&mut state, &params, &f, &mut search, Execution::Sequential);
        assert_eq!(state.diversifications, 1);
        assert_eq!(state.chances_left, params.chance_max);
        assert_eq!(state.best, initial_best);
    }

    #[test]
    fn tab_grows_by_one_unique_entry_per_step() {
        let f = FnFitness::new(8, |mask: &FeatureMask| {
            // Rugged but deterministic landscape.
            let v = mask.bits().iter().enumerate().fold(0u64, |h, (i, &b)| {
                h.wrapping_mul(31)
                    .wrapping_add(if b { i as u64 + 7 } else { 3 })
            });
            (v % 97) as f64 / 97.0
        });
        let params = BsoParams {
            seed: 8,
            ..BsoParams::default()
        };
        let mut state = ColonyState::new(&f, &params);
        let mut search = HillClimb { ls_iter: 4 };
        for step in 1..=10 {
            bso_step(&mut state, &params, &f, &mut search, Execution::Sequential);
            assert_eq!(state.tab.len(), step);
            assert!(state.dance.len() <= params.num_bees);
            if state.taboo_fallbacks == 0 {
                assert!(!state.tab.contains(&state.reference));
            }
        }
    }

    #[test]
    fn popcount_reaches_optimum_at_defaults() {
        let f = popcount(6);
        let params = BsoParams {
            seed: 42,
            ..BsoParams::default()
        };
        let out = run_bso_with(&f, &params, Execution::Sequential);
        assert_eq!(out.best.mask, FeatureMask::ones(6));
        assert_eq!(out.best.fitness.accuracy, 1.0);
        assert!(out.iterations <= params.max_iter);
    }

    #[test]
    fn single_iteration_runs_one_step() {
        let f = FnFitness::new(5, |_: &FeatureMask| 0.3);
        let params = BsoParams {
            max_iter: 1,
            ..BsoParams::default()
        };
        let out = run_bso_with(&f, &params, Execution::Sequential);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.trajectory.len(), 1);
    }

    #[test]
    fn diversify_prefers_distant_masks() {
        let tab = vec![m("11110000"), m("11111000")];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = diversify(&tab, 8, 100, &mut rng);
        let nearest = tab.iter().map(|t| t.hamming(&d)).min().unwrap();
        assert!(nearest >= 5, "nearest taboo distance {nearest}");
    }

    #[test]
    fn params_validation() {
        assert!(BsoParams::default().validate().is_ok());
        let bad = BsoParams {
            flip: 0,
            ..BsoParams::default()
        };
        assert_eq!(bad.validate(), Err(ParamError::NotPositive("flip")));
        assert_eq!(BsoParams::default().evaluation_budget(), 881);
    }
}
