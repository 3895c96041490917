//! KNN on a projected dataset with accuracy, precision, recall and F1.
//!
//! cargo run --example knn_metrics

use rso::classify::evaluate;
use rso::data::{load_csv, min_max_normalize, project_split, stratified_split, LabelColumn};
use rso::mask::FeatureMask;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/iris.csv");
    let data = min_max_normalize(&load_csv(path, LabelColumn::Last)?);
    let split = stratified_split(&data, 0.8, 1)?;

    // Bit i selects attribute i.
    let masks = ["1111", "0011", "0001", "1100"];
    println!(
        "{:<6} {:>3} {:>8} {:>9} {:>7} {:>7}",
        "mask", "k", "accuracy", "precision", "recall", "f1"
    );
    for m in masks {
        let mask: FeatureMask = m.parse()?;
        let (train, test) = project_split(&split, &mask)?;
        for k in [1, 5] {
            let (counts, metrics) = evaluate(&train, &test, k)?;
            println!(
                "{m:<6} {k:>3} {:>8.3} {:>9.3} {:>7.3} {:>7.3}   ({}/{} correct)",
                metrics.accuracy,
                metrics.precision,
                metrics.recall,
                metrics.f1,
                counts.correct,
                counts.total
            );
        }
    }
    Ok(())
}
