//! Reinforced Swarm Optimization: the BSO colony with each bee's local
//! search replaced by a Q-learning episode over single-attribute toggles.
//!
//! All bees share one Q-table for the whole run. Within a colony step every
//! bee works on a snapshot of the table taken at the start of the step; the
//! transitions they record are then replayed onto the shared table in
//! `(bee, step)` order, so parallel and sequential runs agree exactly.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bso::{self, BeeSearch, BsoParams, ColonyOutcome, ParamError};
use crate::data::SplitDataset;
use crate::fitness::{Candidate, Fitness, FitnessError, WrapperFitness};
use crate::mask::FeatureMask;
use crate::optimizer::{Execution, OptimizerResult};
use crate::rl::{self, QTable, RewardInputs, RlError, RlParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsoParams {
    pub bso: BsoParams,
    pub rl: RlParams,
    pub knn_k: usize,
    /// Feature-count penalty weight in the scalar fitness.
    pub w: f64,
    /// Move to a worse neighbour instead of staying put. Off by default:
    /// episodes only move when the scalar fitness does not drop.
    pub accept_worse: bool,
}

impl Default for RsoParams {
    fn default() -> Self {
        Self {
            bso: BsoParams::default(),
            rl: RlParams::default(),
            knn_k: 5,
            w: 0.01,
            accept_worse: false,
        }
    }
}

impl RsoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        self.bso.validate()?;
        if self.knn_k == 0 {
            return Err(ParamError::NotPositive("knn_k"));
        }
        for (name, v) in [
            ("lr", self.rl.lr),
            ("alpha", self.rl.alpha),
            ("beta", self.rl.beta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ParamError::OutOfUnitRange {
                    name,
                    value: v.to_string(),
                });
            }
        }
        if !(0.0..1.0).contains(&self.w) {
            return Err(ParamError::OutOfUnitRange {
                name: "w",
                value: self.w.to_string(),
            });
        }
        Ok(())
    }
}

/// One learning step of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: FeatureMask,
    pub action: usize,
    pub reward: f64,
    pub next: FeatureMask,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    /// Best mask visited, including the start.
    pub best: Candidate,
    pub transitions: Vec<Transition>,
}

/// Runs `ls_iter` Q-learning steps from `start`, updating `table` in place.
///
/// Each step picks an epsilon-greedy toggle, scores the resulting mask,
/// rewards the move and applies the Q update. The walker then moves only if
/// the new scalar fitness is not worse (unless `accept_worse`); rejected
/// moves still update the table.
pub fn rl_episode<F: Fitness + ?Sized, R: Rng + ?Sized>(
    start: &FeatureMask,
    table: &mut QTable,
    params: &RsoParams,
    fitness: &F,
    rng: &mut R,
) -> Episode {
    let mut current = Candidate {
        mask: start.clone(),
        fitness: fitness.evaluate(start),
    };
    let mut best = current.clone();
    let mut transitions = Vec::with_capacity(params.bso.ls_iter);
    for _ in 0..params.bso.ls_iter {
        let action = match rl::select_action(table, &current.mask, params.rl.beta, rng) {
            Ok(a) => a,
            Err(RlError::NoLegalAction) => break,
            Err(e) => unreachable!("select_action: {e}"),
        };
        let next_mask = rl::apply_action(&current.mask, action).expect("selected action is legal");
        let next = Candidate {
            fitness: fitness.evaluate(&next_mask),
            mask: next_mask,
        };
        let reward = rl::reward(RewardInputs {
            acc_t: current.fitness.accuracy,
            acc_next: next.fitness.accuracy,
            num_t: current.fitness.num_features,
            num_next: next.fitness.num_features,
        });
        rl::q_update(table, &current.mask, action, reward, &next.mask, &params.rl)
            .expect("action in range");
        transitions.push(Transition {
            state: current.mask.clone(),
            action,
            reward,
            next: next.mask.clone(),
        });
        if next.improves_on(&best) {
            best = next.clone();
        }
        if params.accept_worse || next.fitness.scalar >= current.fitness.scalar {
            current = next;
        }
    }
    Episode { best, transitions }
}

/// Q-learning bee search with a table shared across bees and iterations.
#[derive(Debug, Clone)]
pub struct QLearningSearch {
    pub table: QTable,
    params: RsoParams,
}

impl QLearningSearch {
    pub fn new(params: RsoParams) -> Self {
        Self {
            table: QTable::new(),
            params,
        }
    }
}

impl BeeSearch for QLearningSearch {
    type Trace = Vec<Transition>;

    fn search<F: Fitness>(
        &self,
        start: &FeatureMask,
        fitness: &F,
        rng: &mut ChaCha8Rng,
    ) -> (Candidate, Vec<Transition>) {
        let mut snapshot = self.table.clone();
        let ep = rl_episode(start, &mut snapshot, &self.params, fitness, rng);
        (ep.best, ep.transitions)
    }

    fn merge(&mut self, traces: Vec<Vec<Transition>>) {
        for t in traces.iter().flatten() {
            rl::q_update(
                &mut self.table,
                &t.state,
                t.action,
                t.reward,
                &t.next,
                &self.params.rl,
            )
            .expect("action in range");
        }
    }
}

/// RSO on any fitness oracle. Returns the outcome and the learned table.
pub fn run_rso_with<F: Fitness>(
    fitness: &F,
    params: &RsoParams,
    exec: Execution,
) -> (ColonyOutcome, QTable) {
    let mut search = QLearningSearch::new(*params);
    let outcome = bso::run_colony(fitness, &params.bso, &mut search, exec);
    (outcome, search.table)
}

/// RSO wrapper feature selection with a KNN holdout fitness.
pub fn run_rso(
    data: &SplitDataset,
    params: &RsoParams,
    exec: Execution,
) -> Result<OptimizerResult, FitnessError> {
    let fitness = WrapperFitness::new(data, params.knn_k, params.w)?;
    let start = Instant::now();
    let (outcome, _) = run_rso_with(&fitness, params, exec);
    let elapsed = start.elapsed().as_secs_f64();
    bso::finish(&fitness, outcome, elapsed)
}
