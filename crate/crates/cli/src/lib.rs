//! Configuration, experiment runner and sweeps behind the `fedcal` binary.

pub mod config;
pub mod experiment;
pub mod sweep;

pub use config::{ExperimentConfig, M0};
pub use experiment::{run_experiment, write_outputs, ExperimentResult, LoadedData, Summary};
pub use sweep::{sweep, Axis};
