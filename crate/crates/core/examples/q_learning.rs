//! The Q-learning pieces on their own: reward cases, the update rule, an
//! epsilon-greedy episode and the text dump of the learned table.
//!
//! cargo run --example q_learning -- [dump.txt]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rso::fitness::FnFitness;
use rso::mask::FeatureMask;
use rso::rl::{q_update, reward, QTable, RewardInputs, RlParams};
use rso::rso::{rl_episode, RsoParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("reward cases:");
    for (acc_t, acc_next, num_t, num_next) in [
        (0.8, 0.9, 3, 4),
        (0.9, 0.8, 3, 2),
        (0.8, 0.8, 5, 4),
        (0.8, 0.8, 4, 5),
        (0.8, 0.8, 4, 4),
    ] {
        let r = reward(RewardInputs {
            acc_t,
            acc_next,
            num_t,
            num_next,
        });
        println!("  acc {acc_t} -> {acc_next}, features {num_t} -> {num_next}: {r:+.2}");
    }

    let params = RlParams::default();
    let mut table = QTable::new();
    let s: FeatureMask = "0101".parse()?;
    let next: FeatureMask = "1101".parse()?;
    let q = q_update(&mut table, &s, 0, 1.0, &next, &params)?;
    println!("\none update from an empty table with reward 1: Q({s}, 0) = {q}");

    // Accuracy peaks at a two-attribute subset.
    let fitness = FnFitness::with_weight(6, 0.01, |m: &FeatureMask| {
        let good = m.get(1) as u8 + m.get(4) as u8;
        0.6 + 0.2 * good as f64 - 0.05 * (m.count_ones() as f64 - good as f64)
    });
    let mut rp = RsoParams::default();
    rp.bso.ls_iter = 40;
    rp.rl.beta = 0.3;
    let mut table = QTable::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start: FeatureMask = "111111".parse()?;
    let ep = rl_episode(&start, &mut table, &rp, &fitness, &mut rng);
    println!(
        "\nepisode from {start}: best {} (accuracy {:.2}), {} transitions, {} table cells over {} states",
        ep.best.mask,
        ep.best.fitness.accuracy,
        ep.transitions.len(),
        table.len(),
        table.n_states()
    );

    let dump = table.dump();
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &dump)?;
            println!("table written to {path}");
        }
        None => {
            println!("\nfirst lines of the table dump (state,action,q):");
            for line in dump.lines().take(8) {
                println!("  {line}");
            }
        }
    }
    Ok(())
}
