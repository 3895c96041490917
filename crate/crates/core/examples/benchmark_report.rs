//! A small benchmark: several algorithms, datasets and seeds, with the
//! report printed as markdown and written as CSV.
//!
//! cargo run --release --example benchmark_report -- [out.csv]

use rso::bench::{run_benchmark, Algorithm, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");
    let cfg = RunConfig {
        datasets: ["iris", "wine", "thyroid"]
            .iter()
            .map(|d| format!("{data}/{d}.csv").into())
            .collect(),
        algorithms: vec![
            Algorithm::None,
            Algorithm::Bso,
            Algorithm::Rso,
            Algorithm::Random,
        ],
        seeds: (1..=3).collect(),
        ..RunConfig::default()
    };
    let report = run_benchmark(&cfg)?;
    print!("{}", report.to_markdown());
    for f in &report.failures {
        eprintln!("failed: {f}");
    }
    if let Some(out) = std::env::args().nth(1) {
        std::fs::write(&out, report.to_csv())?;
        println!("\nCSV written to {out}");
    }
    Ok(())
}
