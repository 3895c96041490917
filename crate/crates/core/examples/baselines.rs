//! RSO next to the random-search and binary PSO baselines, all given the
//! same number of fitness draws.
//!
//! cargo run --release --example baselines

use rso::bench::baselines::{run_bpso_baseline, run_random_baseline, BpsoParams};
use rso::data::{load_csv, min_max_normalize, stratified_split, LabelColumn};
use rso::optimizer::Execution;
use rso::rso::{run_rso, RsoParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/breastcancer_wisconsin.csv"
    );
    let data = min_max_normalize(&load_csv(path, LabelColumn::Last)?);
    let params = RsoParams::default();
    let budget = params.bso.evaluation_budget();
    println!(
        "{}: {} attributes, budget {budget} draws\n",
        data.name,
        data.n_attributes()
    );
    println!(
        "{:<5} {:<7} {:>9} {:>9} {:>12}",
        "seed", "method", "accuracy", "features", "evaluations"
    );

    for seed in 1..=3 {
        let split = stratified_split(&data, 0.8, seed)?;
        let mut p = params;
        p.bso.seed = seed;
        let runs = [
            ("rso", run_rso(&split, &p, Execution::Parallel)?),
            (
                "random",
                run_random_baseline(&split, budget, seed, p.knn_k, p.w)?,
            ),
            (
                "bpso",
                run_bpso_baseline(
                    &split,
                    &BpsoParams::default(),
                    budget,
                    seed,
                    p.knn_k,
                    p.w,
                    Execution::Parallel,
                )?,
            ),
        ];
        for (name, r) in runs {
            println!(
                "{seed:<5} {name:<7} {:>8.2}% {:>9} {:>12}",
                r.report.metrics.accuracy * 100.0,
                r.report.num_features,
                r.evaluations
            );
        }
    }
    Ok(())
}
