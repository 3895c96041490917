//! Wrapper feature selection with Bee Swarm Optimization (BSO) and its
//! Q-learning guided variant, Reinforced Swarm Optimization (RSO).
//!
//! Candidate subsets are [`FeatureMask`]s scored by a KNN classifier on a
//! stratified holdout split. See the `examples/` directory for end-to-end
//! usage.

pub mod bench;
pub mod bso;
pub mod classify;
pub mod data;
pub mod fitness;
pub mod mask;
pub mod optimizer;
pub mod rl;
pub mod rso;

pub use bso::{run_bso, run_bso_with, BsoParams};
pub use classify::{evaluate, knn_predict, Metrics};
pub use data::{load_csv, min_max_normalize, stratified_split, Dataset, LabelColumn, SplitDataset};
pub use fitness::{wrapper_fitness, Fitness, FitnessValue, WrapperFitness};
pub use mask::FeatureMask;
pub use optimizer::{Execution, OptimizerResult};
pub use rl::{QTable, RlParams};
pub use rso::{run_rso, run_rso_with, RsoParams};
