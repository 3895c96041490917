//! Reference baselines for the harness: uniform random search and a binary
//! PSO with sigmoid transfer. Both are budget-matched by fitness draws.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bso::{self, ColonyOutcome, ParamError};
use crate::data::SplitDataset;
use crate::fitness::{Candidate, Fitness, FitnessError, WrapperFitness};
use crate::mask::FeatureMask;
use crate::optimizer::{setup_rng, Execution, OptimizerResult};

/// Draws `budget` uniform nonempty masks and keeps the best.
///
/// The trajectory holds the best scalar after every draw.
pub fn random_search_with<F: Fitness>(fitness: &F, budget: usize, seed: u64) -> ColonyOutcome {
    assert!(budget >= 1, "random search needs a budget of at least 1");
    let mut rng = setup_rng(seed);
    let n = fitness.n_features();
    let mut best: Option<Candidate> = None;
    let mut trajectory = Vec::with_capacity(budget);
    for _ in 0..budget {
        let c = fitness.candidate(FeatureMask::random_nonempty(n, &mut rng));
        match &best {
            Some(b) if c.rank(b).is_ge() => {}
            _ => best = Some(c),
        }
        trajectory.push(best.as_ref().unwrap().fitness.scalar);
    }
    ColonyOutcome {
        best: best.unwrap(),
        trajectory,
        iterations: budget,
        evaluations: fitness.evaluations(),
        taboo_fallbacks: 0,
        diversifications: 0,
    }
}

pub fn run_random_baseline(
    data: &SplitDataset,
    budget: usize,
    seed: u64,
    knn_k: usize,
    w: f64,
) -> Result<OptimizerResult, FitnessError> {
    let fitness = WrapperFitness::new(data, knn_k, w)?;
    let start = Instant::now();
    let outcome = random_search_with(&fitness, budget, seed);
    bso::finish(&fitness, outcome, start.elapsed().as_secs_f64())
}

/// Defaults are the usual constriction-equivalent coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpsoParams {
    pub particles: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity clamp.
    pub vmax: f64,
}

impl Default for BpsoParams {
    fn default() -> Self {
        Self {
            particles: 8,
            inertia: 0.7298,
            cognitive: 1.49618,
            social: 1.49618,
            vmax: 4.0,
        }
    }
}

impl BpsoParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.particles == 0 {
            return Err(ParamError::NotPositive("particles"));
        }
        for (name, v) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
            ("vmax", self.vmax),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ParamError::OutOfUnitRange {
                    name,
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Swarm state between generations.
pub struct BpsoSwarm {
    pub positions: Vec<FeatureMask>,
    pub velocities: Vec<Vec<f64>>,
    pub personal_best: Vec<Candidate>,
    pub global_best: Candidate,
    params: BpsoParams,
    rng: ChaCha8Rng,
}

fn score_all<F: Fitness>(fitness: &F, masks: &[FeatureMask], exec: Execution) -> Vec<Candidate> {
    match exec {
        Execution::Parallel => masks
            .par_iter()
            .map(|m| fitness.candidate(m.clone()))
            .collect(),
        Execution::Sequential => masks.iter().map(|m| fitness.candidate(m.clone())).collect(),
    }
}

impl BpsoSwarm {
    /// Random nonempty particles with zero velocity.
    pub fn new<F: Fitness>(fitness: &F, params: BpsoParams, seed: u64, exec: Execution) -> Self {
        let mut rng = setup_rng(seed);
        let n = fitness.n_features();
        let positions: Vec<FeatureMask> = (0..params.particles)
            .map(|_| FeatureMask::random_nonempty(n, &mut rng))
            .collect();
        let personal_best = score_all(fitness, &positions, exec);
        let global_best = personal_best
            .iter()
            .min_by(|a, b| a.rank(b))
            .cloned()
            .expect("at least one particle");
        Self {
            velocities: vec![vec![0.0; n]; params.particles],
            positions,
            personal_best,
            global_best,
            params,
            rng,
        }
    }

    /// One velocity/position update and evaluation of every particle.
    pub fn step<F: Fitness>(&mut self, fitness: &F, exec: Execution) {
        let p = self.params;
        for i in 0..self.positions.len() {
            let mut next = FeatureMask::zeros(self.positions[i].len());
            for j in 0..next.len() {
                let x = bit(self.positions[i].get(j));
                let r1: f64 = self.rng.random();
                let r2: f64 = self.rng.random();
                let v = p.inertia * self.velocities[i][j]
                    + p.cognitive * r1 * (bit(self.personal_best[i].mask.get(j)) - x)
                    + p.social * r2 * (bit(self.global_best.mask.get(j)) - x);
                let v = v.clamp(-p.vmax, p.vmax);
                self.velocities[i][j] = v;
                next.set(j, self.rng.random::<f64>() < sigmoid(v));
            }
            if next.is_blank() {
                // Repair with the most likely bit.
                let vel = &self.velocities[i];
                let j = (0..vel.len()).fold(0, |best, j| if vel[j] > vel[best] { j } else { best });
                next.set(j, true);
            }
            self.positions[i] = next;
        }
        let scored = score_all(fitness, &self.positions, exec);
        for (pb, c) in self.personal_best.iter_mut().zip(scored) {
            if c.improves_on(pb) {
                *pb = c;
            }
        }
        for pb in &self.personal_best {
            if pb.improves_on(&self.global_best) {
                self.global_best = pb.clone();
            }
        }
    }
}

/// Binary PSO within `budget` fitness draws (one draw per particle per
/// generation, the initial swarm included).
pub fn bpso_with<F: Fitness>(
    fitness: &F,
    params: &BpsoParams,
    budget: usize,
    seed: u64,
    exec: Execution,
) -> ColonyOutcome {
    assert!(budget >= 1, "BPSO needs a budget of at least 1");
    let params = BpsoParams {
        particles: params.particles.min(budget),
        ..*params
    };
    let mut swarm = BpsoSwarm::new(fitness, params, seed, exec);
    let mut trajectory = vec![swarm.global_best.fitness.scalar];
    let mut draws = params.particles;
    while draws + params.particles <= budget && swarm.global_best.fitness.scalar < fitness.ceiling()
    {
        swarm.step(fitness, exec);
        draws += params.particles;
        trajectory.push(swarm.global_best.fitness.scalar);
    }
    ColonyOutcome {
        best: swarm.global_best,
        iterations: trajectory.len(),
        trajectory,
        evaluations: fitness.evaluations(),
        taboo_fallbacks: 0,
        diversifications: 0,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_bpso_baseline(
    data: &SplitDataset,
    params: &BpsoParams,
    budget: usize,
    seed: u64,
    knn_k: usize,
    w: f64,
    exec: Execution,
) -> Result<OptimizerResult, FitnessError> {
    let fitness = WrapperFitness::new(data, knn_k, w)?;
    let start = Instant::now();
    let outcome = bpso_with(&fitness, params, budget, seed, exec);
    bso::finish(&fitness, outcome, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitness::FnFitness;

    fn table4(values: [f64; 16]) -> FnFitness<impl Fn(&FeatureMask) -> f64 + Sync> {
        FnFitness::new(4, move |m: &FeatureMask| {
            let idx: usize = (0..4).map(|i| (m.get(i) as usize) << i).sum();
            values[idx]
        })
    }

    #[test]
    fn random_budget_one_is_first_draw() {
        let f = table4([
            0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65,
        ]);
        let out = random_search_with(&f, 1, 9);
        let mut rng = setup_rng(9);
        let first = FeatureMask::random_nonempty(4, &mut rng);
        assert_eq!(out.best.mask, first);
        assert_eq!(out.best.fitness, f.evaluate(&first));
        assert_eq!(out.evaluations, 1);
    }

    #[test]
    fn frozen_swarm_keeps_zero_velocity() {
        let f = table4([0.0; 16].map(|_| 0.5));
        let p = BpsoParams {
            inertia: 0.0,
            cognitive: 0.0,
            social: 0.0,
            ..BpsoParams::default()
        };
        let mut swarm = BpsoSwarm::new(&f, p, 3, Execution::Sequential);
        for _ in 0..5 {
            swarm.step(&f, Execution::Sequential);
            assert!(swarm.velocities.iter().flatten().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn single_generation_returns_best_initial_particle() {
        let f = table4([
            0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65,
        ]);
        let p = BpsoParams {
            inertia: 0.0,
            cognitive: 0.0,
            social: 0.0,
            particles: 4,
            vmax: 6.0,
        };
        let out = bpso_with(&f, &p, 4, 11, Execution::Sequential);
        let mut rng = setup_rng(11);
        let initial: Vec<Candidate> = (0..4)
            .map(|_| f.candidate(FeatureMask::random_nonempty(4, &mut rng)))
            .collect();
        let best = initial.iter().min_by(|a, b| a.rank(b)).unwrap();
        assert_eq!(&out.best, best);
        assert_eq!(out.trajectory.len(), 1);
    }

    #[test]
    fn bpso_trajectory_monotone_and_within_budget() {
        let f = FnFitness::new(8, |m: &FeatureMask| ((m.count_ones() * 7) % 9) as f64 / 8.0);
        let out = bpso_with(&f, &BpsoParams::default(), 100, 5, Execution::Parallel);
        assert!(out.trajectory.windows(2).all(|w| w[0] <= w[1]));
        assert!(out.evaluations <= 100);
    }

    #[test]
    fn params_validate() {
        assert!(BpsoParams::default().validate().is_ok());
        let p = BpsoParams {
            particles: 0,
            ..BpsoParams::default()
        };
        assert!(p.validate().is_err());
    }
}
