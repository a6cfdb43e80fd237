//! Probabilistic generative classifiers learned through additive sufficient
//! statistics.
//!
//! A classifier is described by a statistics mapping `s(x, y)` whose values
//! add up over a dataset, and a closed-form parameter mapping `θ(s)`. Every
//! algorithm in this crate only touches those two maps plus the class
//! posterior, so any model that fits [`GenerativeClassifier`] can be
//! calibrated and simulated. [`NaiveBayes`] is the shipped implementation.

mod nb;
mod stats;

use std::sync::Arc;

pub use nb::{parse_dump, FeatureParams, NaiveBayes, NbParams};
pub use stats::StatsVector;

use crate::data::{Dataset, FeatureSchema};
use crate::error::{Error, Result};

/// Floor for counts and zeroth moments.
pub const EPS_COUNT: f64 = 1e-9;
/// Floor for Gaussian variances.
pub const EPS_VARIANCE: f64 = 1e-6;

pub trait GenerativeClassifier: Send + Sync {
    type Params: Clone + Send + Sync + std::fmt::Debug;

    fn schema(&self) -> &Arc<FeatureSchema>;

    /// Length of the statistics vector. The first `r` entries are always the
    /// class counts, so the equivalent sample size is their sum.
    fn stats_len(&self) -> usize;

    /// `stats += weight · s(x, class)`. Inputs are assumed valid.
    fn accumulate(&self, stats: &mut StatsVector, x: &[f64], class: usize, weight: f64);

    fn param_map(&self, stats: &StatsVector) -> Result<Self::Params>;

    /// Writes `log p(x, y)` for every class into `out`.
    fn log_joint(&self, params: &Self::Params, x: &[f64], out: &mut [f64]);

    /// Clamps `stats` back into the region where `param_map` is well defined.
    fn project(&self, stats: &mut StatsVector);

    /// Statistics of equivalent sample size `m0` whose class posterior is
    /// uniform everywhere.
    fn uniform_init(&self, m0: f64) -> Result<StatsVector>;

    fn classes(&self) -> usize {
        self.schema().classes()
    }

    fn zero_stats(&self) -> StatsVector {
        StatsVector::zeros(self.classes(), self.stats_len())
    }
}

pub fn stat_map_instance<M: GenerativeClassifier>(model: &M, x: &[f64], y: usize) -> Result<StatsVector> {
    model.schema().validate_instance(x)?;
    model.schema().validate_label(y)?;
    let mut s = model.zero_stats();
    model.accumulate(&mut s, x, y, 1.0);
    Ok(s)
}

pub fn stat_map_dataset<M: GenerativeClassifier>(model: &M, dataset: &Dataset) -> Result<StatsVector> {
    if dataset.is_empty() {
        return Err(Error::NoInstances);
    }
    let mut s = model.zero_stats();
    for (x, y) in dataset.iter() {
        model.accumulate(&mut s, x, y, 1.0);
    }
    Ok(s)
}

/// Statistics expected under the model's posterior: `Σ_x Σ_y p(y|x) s(x, y)`.
/// Labels of `dataset` are ignored.
pub fn prob_stat_map<M: GenerativeClassifier>(model: &M, dataset: &Dataset, params: &M::Params) -> StatsVector {
    let mut s = model.zero_stats();
    let mut post = vec![0.0; model.classes()];
    for x in dataset.instances() {
        posterior_into(model, params, x, &mut post);
        for (y, &p) in post.iter().enumerate() {
            model.accumulate(&mut s, x, y, p);
        }
    }
    s
}

/// Normalizes log joints in place into a posterior (max-subtracted log-sum-exp).
pub fn softmax_in_place(log_joint: &mut [f64]) {
    let max = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in log_joint.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in log_joint.iter_mut() {
        *v /= total;
    }
}

pub fn posterior_into<M: GenerativeClassifier>(model: &M, params: &M::Params, x: &[f64], out: &mut [f64]) {
    model.log_joint(params, x, out);
    softmax_in_place(out);
}

pub fn posterior<M: GenerativeClassifier>(model: &M, params: &M::Params, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; model.classes()];
    posterior_into(model, params, x, &mut out);
    out
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn predict<M: GenerativeClassifier>(model: &M, params: &M::Params, x: &[f64]) -> usize {
    argmax(&posterior(model, params, x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Errors {
    /// Mean 0-1 loss.
    pub err01: f64,
    /// Mean soft 0-1 loss `1 − p(y|x)`.
    pub soft: f64,
}

pub fn evaluate<M: GenerativeClassifier>(model: &M, params: &M::Params, dataset: &Dataset) -> Result<Errors> {
    if dataset.is_empty() {
        return Err(Error::NoInstances);
    }
    let mut post = vec![0.0; model.classes()];
    let (mut wrong, mut soft) = (0usize, 0.0);
    for (x, y) in dataset.iter() {
        posterior_into(model, params, x, &mut post);
        if argmax(&post) != y {
            wrong += 1;
        }
        soft += 1.0 - post[y];
    }
    let m = dataset.len() as f64;
    Ok(Errors {
        err01: wrong as f64 / m,
        soft: soft / m,
    })
}
