//! Sweep one parameter and print the mean accuracy and time per value.
//!
//! cargo run --release --example parameter_sweep -- [param] [values]
//! e.g. `-- lr 0:1:0.25` or `-- num_bees 2,4,8`

use rso::bench::sweep::{parameter_sweep, parse_values};
use rso::bench::{Algorithm, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let param = args.next().unwrap_or_else(|| "ls_iter".into());
    let values = args.next().map(|s| parse_values(&s)).transpose()?;

    let cfg = RunConfig {
        datasets: vec![concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/wine.csv").into()],
        algorithms: vec![Algorithm::Rso],
        seeds: (1..=3).collect(),
        ..RunConfig::default()
    };
    let sweep = parameter_sweep(&cfg, &param, values.as_deref())?;
    print!("{}", sweep.to_markdown());
    Ok(())
}
