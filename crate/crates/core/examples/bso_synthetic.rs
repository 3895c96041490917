//! Bee Swarm Optimization on a synthetic objective where the optimum is
//! known: reward a hidden subset and penalize every other attribute.
//!
//! cargo run --example bso_synthetic

use rso::bso::{bso_step, run_bso_with, BsoParams, ColonyState, HillClimb};
use rso::fitness::FnFitness;
use rso::mask::FeatureMask;
use rso::optimizer::Execution;

const N: usize = 20;
const HIDDEN: [usize; 5] = [1, 4, 7, 12, 18];

fn objective() -> FnFitness<impl Fn(&FeatureMask) -> f64 + Sync> {
    FnFitness::new(N, |m: &FeatureMask| {
        let hits = HIDDEN.iter().filter(|&&i| m.get(i)).count() as f64;
        let noise = (m.count_ones() as f64 - hits) / N as f64;
        (hits / HIDDEN.len() as f64 - 0.5 * noise).max(0.0)
    })
}

fn main() {
    let fitness = objective();

    let params = BsoParams {
        seed: 7,
        ..BsoParams::default()
    };

    // Step by step, to watch the colony state.
    let mut state = ColonyState::new(&fitness, &params);
    let mut search = HillClimb {
        ls_iter: params.ls_iter,
    };
    println!("iter  best                   scalar  chances  tab");
    for _ in 0..params.max_iter {
        bso_step(
            &mut state,
            &params,
            &fitness,
            &mut search,
            Execution::Sequential,
        );
        println!(
            "{:>4}  {}  {:.3}  {:>7}  {:>3}",
            state.iteration,
            state.best.mask,
            state.best.fitness.scalar,
            state.chances_left,
            state.tab.len()
        );
    }

    // Or in one call.
    let out = run_bso_with(&objective(), &params, Execution::Parallel);
    let optimum: Vec<bool> = (0..N).map(|i| HIDDEN.contains(&i)).collect();
    println!("\nhidden optimum: {}", FeatureMask::from_bits(optimum));
    println!(
        "run_bso_with: best {} scalar {:.3} after {} iterations, {} evaluations, {} diversifications",
        out.best.mask, out.best.fitness.scalar, out.iterations, out.evaluations, out.diversifications
    );
}
