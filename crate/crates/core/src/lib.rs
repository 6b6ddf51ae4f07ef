//! Projection-free online maximization of monotone DR-submodular functions
//! and monotone submodular set functions, under full-information, bandit and
//! responsive-bandit feedback.

pub mod algorithms;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod harness;
pub mod objectives;
pub mod oracles;
pub mod point;
pub mod rng;
pub mod rounding;

pub use error::{Error, Result};
pub use geometry::{shrink_interior, Bounds, ConstraintSet, InteriorSet, Region};
pub use harness::{run_experiment, ExperimentConfig};
pub use objectives::{
    ContinuousObjective, MultilinearExtension, ObjectiveConstants, QuadraticDR, SetFunction, SetObjective,
};
pub use oracles::{LinearOracle, OracleBank, OracleSpec};
pub use point::Point;
pub use rng::{Purpose, SeedTree, GENERATOR_ID};
pub use rounding::Matroid;
