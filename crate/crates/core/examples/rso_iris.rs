//! RSO feature selection on one dataset, compared with plain BSO on the
//! same split.
//!
//! cargo run --release --example rso_iris -- [path.csv] [seed]

use rso::bso::run_bso;
use rso::data::{load_csv, min_max_normalize, stratified_split, LabelColumn};
use rso::optimizer::{Execution, OptimizerResult};
use rso::rso::{run_rso, RsoParams};

fn show(name: &str, r: &OptimizerResult, attrs: &[String]) {
    let chosen: Vec<&str> = r
        .best_mask
        .selected()
        .iter()
        .map(|&i| attrs[i].as_str())
        .collect();
    let m = r.report.metrics;
    println!(
        "{name}: accuracy {:.2}%  precision {:.2}%  recall {:.2}%  f1 {:.2}%",
        m.accuracy * 100.0,
        m.precision * 100.0,
        m.recall * 100.0,
        m.f1 * 100.0
    );
    println!(
        "     {} features [{}], {} evaluations, {} iterations, {:.3}s",
        r.report.num_features,
        chosen.join(", "),
        r.evaluations,
        r.iterations,
        r.report.time_seconds
    );
    let traj: Vec<String> = r.trajectory.iter().map(|v| format!("{v:.4}")).collect();
    println!("     best per iteration: {}", traj.join(" "));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/iris.csv").into());
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let data = min_max_normalize(&load_csv(&path, LabelColumn::Last)?);
    let split = stratified_split(&data, 0.8, seed)?;
    let mut params = RsoParams::default();
    params.bso.seed = seed;

    println!(
        "{} with seed {seed}, {} attributes\n",
        data.name,
        data.n_attributes()
    );
    let rso = run_rso(&split, &params, Execution::Parallel)?;
    show("RSO", &rso, data.attribute_names());
    let bso = run_bso(
        &split,
        &params.bso,
        params.knn_k,
        params.w,
        Execution::Parallel,
    )?;
    show("BSO", &bso, data.attribute_names());
    Ok(())
}
