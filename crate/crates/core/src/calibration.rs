//! Risk-based calibration of sufficient statistics.
//!
//! One calibration step moves the statistics along
//! `s(X, Y) − s(X, θ)`: the true-label statistics minus the statistics
//! expected under the current posterior. Both terms carry total class mass
//! `|X|`, so a step never changes the equivalent sample size.
//!
//! The iterative procedures ([`rc`], [`lrc`]) carry the unprojected iterates
//! and map parameters through [`project`]. Averaging raw iterates across
//! nodes is then exactly the pooled update, whatever each node's data; a
//! node-local floor would break that.

use std::io;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{evaluate, prob_stat_map, stat_map_dataset, GenerativeClassifier, StatsVector};

/// Floors counts and zeroth moments and lifts second moments so that every
/// variance is at least the variance floor. Idempotent.
pub fn project<M: GenerativeClassifier>(model: &M, stats: &StatsVector) -> StatsVector {
    let mut out = stats.clone();
    model.project(&mut out);
    out
}

fn step<M: GenerativeClassifier>(
    model: &M,
    stats: &StatsVector,
    true_stats: &StatsVector,
    dataset: &Dataset,
    lr: f64,
    params: &M::Params,
) -> StatsVector {
    let mut direction = true_stats.clone();
    direction -= &prob_stat_map(model, dataset, params);
    let mut out = stats.clone();
    out.add_scaled(&direction, lr);
    out
}

/// `θ(project(stats))`.
pub fn params_of<M: GenerativeClassifier>(model: &M, stats: &StatsVector) -> Result<M::Params> {
    model.param_map(&project(model, stats))
}

fn check_lr(lr: f64) -> Result<()> {
    if lr >= 0.0 && lr.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "learning rate must be non-negative, got {lr}"
        )))
    }
}

/// `project(stats + lr · (s(X, Y) − s(X, θ)))`.
pub fn rc_update<M: GenerativeClassifier>(
    model: &M,
    stats: &StatsVector,
    dataset: &Dataset,
    lr: f64,
    params: &M::Params,
) -> Result<StatsVector> {
    check_lr(lr)?;
    let true_stats = stat_map_dataset(model, dataset)?;
    Ok(project(model, &step(model, stats, &true_stats, dataset, lr, params)))
}

#[derive(Debug, Clone)]
pub struct RcIteration<P> {
    pub t: usize,
    pub soft_err: f64,
    pub err01: f64,
    pub params: P,
    pub stats: StatsVector,
}

/// Every iterate of a calibration run, starting from the initialization.
#[derive(Debug, Clone)]
pub struct RcTrace<P> {
    iterations: Vec<RcIteration<P>>,
    best: usize,
}

impl<P> RcTrace<P> {
    pub fn iterations(&self) -> &[RcIteration<P>] {
        &self.iterations
    }

    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    /// The model returned by calibration: the last iterate.
    pub fn final_iteration(&self) -> &RcIteration<P> {
        self.iterations.last().expect("trace holds the initialization")
    }

    /// Iterate with the lowest training soft error (earliest on ties).
    pub fn best_soft(&self) -> &RcIteration<P> {
        &self.iterations[self.best]
    }

    /// Writes `t,soft_err,err01` rows.
    pub fn write_csv(&self, writer: impl io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["t", "soft_err", "err01"])?;
        for it in &self.iterations {
            wtr.write_record([it.t.to_string(), it.soft_err.to_string(), it.err01.to_string()])?;
        }
        wtr.flush().map_err(|source| Error::Io {
            path: "<rc trace>".into(),
            source,
        })
    }
}

/// Centralized calibration: `t_max` updates from `init` with learning rate
/// `lr`. Iterates are kept unprojected; parameters are `θ(project(s))`.
pub fn rc<M: GenerativeClassifier>(
    model: &M,
    dataset: &Dataset,
    lr: f64,
    t_max: usize,
    init: &StatsVector,
) -> Result<RcTrace<M::Params>> {
    check_lr(lr)?;
    if t_max == 0 {
        return Err(Error::InvalidArgument("t_max must be at least 1".into()));
    }
    let true_stats = stat_map_dataset(model, dataset)?;
    let mut stats = init.clone();
    let mut iterations = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            let prev: &RcIteration<M::Params> = iterations.last().expect("initial iterate");
            stats = step(model, &prev.stats, &true_stats, dataset, lr, &prev.params);
        }
        let params = params_of(model, &stats)?;
        let errors = evaluate(model, &params, dataset)?;
        iterations.push(RcIteration {
            t,
            soft_err: errors.soft,
            err01: errors.err01,
            params,
            stats: stats.clone(),
        });
    }
    let best = iterations
        .iter()
        .enumerate()
        .fold(0, |b, (i, it)| if it.soft_err < iterations[b].soft_err { i } else { b });
    Ok(RcTrace { iterations, best })
}

/// Local calibration: `iter` unit-rate updates of aggregated statistics on
/// local data. The equivalent sample size of `agg_stats` acts as the inverse
/// learning rate. Returns `θ(project(s))` and the unprojected final iterate.
pub fn lrc<M: GenerativeClassifier>(
    model: &M,
    agg_stats: &StatsVector,
    local: &Dataset,
    iter: usize,
) -> Result<(M::Params, StatsVector)> {
    if iter == 0 {
        return Err(Error::InvalidArgument("iter must be at least 1".into()));
    }
    let true_stats = stat_map_dataset(model, local)?;
    let mut stats = agg_stats.clone();
    let mut params = params_of(model, &stats)?;
    for _ in 0..iter {
        stats = step(model, &stats, &true_stats, local, 1.0, &params);
        params = params_of(model, &stats)?;
    }
    Ok((params, stats))
}
