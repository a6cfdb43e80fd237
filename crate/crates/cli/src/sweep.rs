//! One experiment per value of a single configuration axis.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use fedcal_core::Dataset;

use crate::config::ExperimentConfig;
use crate::experiment::{run_experiment, write_outputs, Summary, SUMMARY_FIELDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    MV,
    N,
    Topology,
    Partition,
    Iter,
    Delta,
    /// Varies `n` with `m_v = m_total / n`, keeping the global training set size.
    Fragmentation,
}

impl FromStr for Axis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "m_v" => Axis::MV,
            "n" => Axis::N,
            "topology" => Axis::Topology,
            "partition" => Axis::Partition,
            "iter" => Axis::Iter,
            "delta" | "δ" => Axis::Delta,
            "fragmentation" => Axis::Fragmentation,
            _ => bail!("unknown sweep axis {s:?} (m_v, n, topology, partition, iter, delta, fragmentation)"),
        })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::MV => "m_v",
            Axis::N => "n",
            Axis::Topology => "topology",
            Axis::Partition => "partition",
            Axis::Iter => "iter",
            Axis::Delta => "delta",
            Axis::Fragmentation => "fragmentation",
        })
    }
}

impl Axis {
    /// `base` with this axis set to `value`, validated.
    pub fn apply(&self, base: &ExperimentConfig, value: &str) -> Result<ExperimentConfig> {
        let mut c = base.clone();
        match self {
            Axis::Fragmentation => {
                let total = base.m_total.unwrap_or(base.m());
                c.set("n", value)?;
                if c.n == 0 || !total.is_multiple_of(c.n) {
                    bail!("m_total = {total} is not divisible by n = {}", c.n);
                }
                c.m_v = total / c.n;
            }
            other => c.set(&other.to_string(), value)?,
        }
        c.validate().with_context(|| format!("{self} = {value}"))?;
        Ok(c)
    }

    /// Canonical text of the swept value in `config`.
    fn render(&self, config: &ExperimentConfig) -> String {
        match self {
            Axis::MV => config.m_v.to_string(),
            Axis::N | Axis::Fragmentation => config.n.to_string(),
            Axis::Topology => config.topology.to_string(),
            Axis::Partition => config.partition.to_string(),
            Axis::Iter => config.iter.to_string(),
            Axis::Delta => config.delta.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub m_v: usize,
    pub n: usize,
    pub summary: Summary,
}

/// Runs the sweep, writing each point to `out_dir/<axis>_<value>/` and the
/// table of final-round means to `out_dir/summary_<axis>.csv`.
pub fn sweep(
    base: &ExperimentConfig,
    axis: Axis,
    values: &[String],
    dataset_name: &str,
    dataset: &Dataset,
    out_dir: &Path,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        bail!("no sweep values given");
    }
    let configs: Vec<ExperimentConfig> = values.iter().map(|v| axis.apply(base, v)).collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(configs.len());
    for config in &configs {
        let value = axis.render(config);
        let result = run_experiment(config, dataset).with_context(|| format!("{axis} = {value}"))?;
        write_outputs(config, &result, &out_dir.join(format!("{axis}_{value}")))?;
        points.push(SweepPoint {
            value,
            m_v: config.m_v,
            n: config.n,
            summary: result.summary,
        });
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["dataset", "axis", "value", "n", "m_v"];
    header.extend(SUMMARY_FIELDS);
    wtr.write_record(&header)?;
    for p in &points {
        let mut record = vec![
            dataset_name.to_string(),
            axis.to_string(),
            p.value.clone(),
            p.n.to_string(),
            p.m_v.to_string(),
        ];
        record.extend(p.summary.fields().iter().map(f64::to_string));
        wtr.write_record(&record)?;
    }
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("summary_{axis}.csv"));
    fs::write(&path, wtr.into_inner()?).with_context(|| format!("writing {}", path.display()))?;
    Ok(points)
}
