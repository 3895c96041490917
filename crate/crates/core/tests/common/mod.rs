#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rso::fitness::{Fitness, FnFitness};
use rso::mask::FeatureMask;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(format!("{name}.csv"))
}

/// Bit `i` of the mask is bit `i` of the table index.
pub fn mask_index(m: &FeatureMask) -> usize {
    (0..m.len()).map(|i| (m.get(i) as usize) << i).sum()
}

pub fn table_fitness(n: usize, values: Vec<f64>) -> FnFitness<impl Fn(&FeatureMask) -> f64 + Sync> {
    assert_eq!(values.len(), 1 << n);
    FnFitness::new(n, move |m: &FeatureMask| values[mask_index(m)])
}

/// Every nonempty mask of length `n`.
pub fn all_masks(n: usize) -> Vec<FeatureMask> {
    (1..1usize << n)
        .map(|i| FeatureMask::from_bits((0..n).map(|b| i >> b & 1 == 1).collect()))
        .collect()
}

/// Brute-force best mask by scalar, then fewer features, then mask order.
pub fn exhaustive_optimum<F: Fitness>(f: &F) -> FeatureMask {
    all_masks(f.n_features())
        .into_iter()
        .map(|m| f.candidate(m))
        .min_by(|a, b| a.rank(b))
        .unwrap()
        .mask
}

/// Named 4-bit landscapes, each with a unique best mask.
pub fn landscapes4() -> Vec<(&'static str, Vec<f64>)> {
    let mut out = Vec::new();
    // Accuracy grows with size.
    out.push((
        "popcount",
        (0..16).map(|i: u32| i.count_ones() as f64 / 4.0).collect(),
    ));
    // Single needle, everything else flat.
    out.push((
        "needle",
        (0..16)
            .map(|i| if i == 0b1010 { 0.9 } else { 0.5 })
            .collect(),
    ));
    // Deceptive trap: fewer bits look better except the full mask.
    out.push((
        "trap",
        (0..16u32)
            .map(|i| {
                if i == 15 {
                    1.0
                } else {
                    0.8 - 0.2 * i.count_ones() as f64
                }
            })
            .collect(),
    ));
    // Seeded random values; a small index term keeps the optimum unique.
    for s in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + s);
        let name = ["random-a", "random-b", "random-c"][s as usize];
        out.push((
            name,
            (0..16)
                .map(|i| rng.random::<f64>() * 0.9 + i as f64 * 1e-6)
                .collect(),
        ));
    }
    out
}
