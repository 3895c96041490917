//! Load a CSV dataset, rescale it and make a stratified holdout split.
//!
//! cargo run --example load_and_split -- [path.csv] [train_fraction]

use rso::data::{load_csv, min_max_normalize, stratified_split, LabelColumn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/glass.csv").into());
    let fraction: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.8);

    let raw = load_csv(&path, LabelColumn::Last)?;
    println!(
        "{}: {} instances, {} attributes, {} classes",
        raw.name,
        raw.n_instances(),
        raw.n_attributes(),
        raw.n_classes()
    );
    println!("attributes: {}", raw.attribute_names().join(", "));

    let data = min_max_normalize(&raw);
    for (j, name) in data.attribute_names().iter().enumerate().take(3) {
        let (lo, hi) = data
            .column(j)
            .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
        println!("  {name}: rescaled to [{lo}, {hi}]");
    }

    let split = stratified_split(&data, fraction, 42)?;
    println!(
        "\ntrain {} / test {} (fraction {fraction}, seed 42)",
        split.train_rows.len(),
        split.test_rows.len()
    );
    println!("{:<20} {:>6} {:>6}", "class", "train", "test");
    for (c, name) in data.class_names().iter().enumerate() {
        let tr = split.train.labels().iter().filter(|&&l| l == c).count();
        let te = split.test.labels().iter().filter(|&&l| l == c).count();
        println!("{name:<20} {tr:>6} {te:>6}");
    }
    for w in &split.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
