//! Decentralized federated learning of probabilistic generative classifiers.
//!
//! Every node of a communication graph keeps an additive vector of sufficient
//! statistics. Each round a node averages the statistics published by its
//! neighborhood and then calibrates the average against its own data with a
//! risk-based update, which moves statistics along the difference between the
//! true-label statistics and the statistics expected under the model's class
//! posterior. The crate ships a naive Bayes classifier with mixed discrete and
//! Gaussian features, the centralized calibration baseline, graph generators,
//! non-i.i.d. data partitioners, and a synchronous round simulator.
//!
//! Indices are 0-based throughout the library (classes, categories, nodes).
//! File formats that humans read (edge lists, parameter dumps) use 1-based ids.

#![allow(clippy::needless_range_loop)]

pub mod calibration;
pub mod data;
mod error;
pub mod model;
pub mod network;
pub mod partition;
pub mod sim;
pub mod synthetic;

pub use calibration::{lrc, params_of, project, rc, rc_update, RcIteration, RcTrace};
pub use data::{Codebook, Dataset, FeatureSchema, FeatureSpec, RawTable};
pub use error::{Error, Result};
pub use model::{
    evaluate, posterior, predict, prob_stat_map, stat_map_dataset, stat_map_instance, FeatureParams,
    GenerativeClassifier, NaiveBayes, NbParams, StatsVector, EPS_COUNT, EPS_VARIANCE,
};
pub use network::{Graph, Neighborhood, Period, RewireSchedule, Topology};
pub use partition::{PartitionMode, PartitionPlan};
pub use sim::{
    baseline_errors, evaluate_round, m0_heuristic, mean_std, run_baseline, run_crc, write_metrics_csv, BaselineConfig,
    BaselineKind, BaselineResult, CrcConfig, CrcOutcome, Evaluation, NodeState, RoundErrors, RoundMetrics, Simulation,
    METRICS_HEADER,
};
