//! Experiment configuration: flat `key = value` lines with `#` comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use fedcal_core::{m0_heuristic, Neighborhood, PartitionMode, Period, Topology};

/// Equivalent sample size of the initial node statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum M0 {
    /// `m / (lr · n)` with `m = n · m_v`, i.e. `m_v / lr`.
    #[default]
    Heuristic,
    Value(f64),
}

impl FromStr for M0 {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "heuristic" {
            return Ok(M0::Heuristic);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| anyhow!("expected a number or `heuristic`, got {s:?}"))?;
        Ok(M0::Value(v))
    }
}

impl fmt::Display for M0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            M0::Heuristic => f.write_str("heuristic"),
            M0::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: Option<PathBuf>,
    /// Header name or 0-based index; the last column when unset.
    pub label: Option<String>,
    pub n: usize,
    pub m_v: usize,
    pub t_max: usize,
    pub iter: usize,
    pub lr: f64,
    pub m0: M0,
    pub topology: Topology,
    pub neighborhood: Neighborhood,
    pub partition: PartitionMode,
    pub delta: Period,
    /// Instances reserved for training; `n · m_v` when unset.
    pub train_size: Option<usize>,
    /// Instances reserved for testing; everything left over when unset.
    pub test_size: Option<usize>,
    pub seed: u64,
    pub repetitions: usize,
    pub ml_smoothing: f64,
    pub parallel: bool,
    /// Fixed global training size for fragmentation sweeps; `n · m_v` when unset.
    pub m_total: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data: None,
            label: None,
            n: 50,
            m_v: 50,
            t_max: 64,
            iter: 1,
            lr: 0.05,
            m0: M0::Heuristic,
            topology: Topology::Tree,
            neighborhood: Neighborhood::Closed,
            partition: PartitionMode::Iid,
            delta: Period::Infinite,
            train_size: None,
            test_size: None,
            seed: 0,
            repetitions: 5,
            ml_smoothing: 1.0,
            parallel: true,
            m_total: None,
        }
    }
}

pub const KEYS: [&str; 19] = [
    "data",
    "label",
    "n",
    "m_v",
    "t_max",
    "iter",
    "lr",
    "m0",
    "topology",
    "neighborhood",
    "partition",
    "delta",
    "train_size",
    "test_size",
    "seed",
    "repetitions",
    "ml_smoothing",
    "parallel",
    "m_total",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| anyhow!("invalid value {value:?} for `{key}`: {e}"))
}

fn parse_auto(key: &str, value: &str) -> Result<Option<usize>> {
    if value == "auto" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn show_auto(v: Option<usize>) -> String {
    v.map_or_else(|| "auto".to_string(), |v| v.to_string())
}

impl ExperimentConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "data" => self.data = Some(PathBuf::from(value)),
            "label" => self.label = Some(value.to_string()),
            "n" => self.n = parse(key, value)?,
            "m_v" => self.m_v = parse(key, value)?,
            "t_max" => self.t_max = parse(key, value)?,
            "iter" => self.iter = parse(key, value)?,
            "lr" => self.lr = parse(key, value)?,
            "m0" => self.m0 = parse(key, value)?,
            "topology" => self.topology = parse(key, value)?,
            "neighborhood" => self.neighborhood = parse(key, value)?,
            "partition" => self.partition = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "train_size" => self.train_size = parse_auto(key, value)?,
            "test_size" => self.test_size = parse_auto(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "repetitions" => self.repetitions = parse(key, value)?,
            "ml_smoothing" => self.ml_smoothing = parse(key, value)?,
            "parallel" => self.parallel = parse(key, value)?,
            "m_total" => self.m_total = parse_auto(key, value)?,
            _ => bail!("unknown key `{key}`"),
        }
        Ok(())
    }

    /// Parses config text over the defaults and validates the result.
    pub fn parse_str(text: &str) -> Result<Self> {
        Self::parse_with_overrides(text, &[])
    }

    /// File values first, then `overrides` in order, then validation.
    pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut config = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            config
                .set(key.trim(), value)
                .with_context(|| format!("line {}", i + 1))?;
        }
        for (key, value) in overrides {
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_with_overrides(&text, overrides).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < self.topology.min_nodes() {
            bail!(
                "topology {} needs at least {} nodes, n = {}",
                self.topology,
                self.topology.min_nodes(),
                self.n
            );
        }
        if let Topology::TreePlus(k) = self.topology {
            let absent = self.n * (self.n - 1) / 2 - (self.n - 1);
            if k > absent {
                bail!(
                    "topology {} adds {k} edges but only {absent} are absent from a tree on {} nodes",
                    self.topology,
                    self.n
                );
            }
        }
        if self.m_v == 0 || self.t_max == 0 || self.iter == 0 || self.repetitions == 0 {
            bail!("m_v, t_max, iter and repetitions must be at least 1");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            bail!("lr must be positive, got {}", self.lr);
        }
        if let M0::Value(v) = self.m0 {
            if !(v > 0.0 && v.is_finite()) {
                bail!("m0 must be positive, got {v}");
            }
        }
        if !(self.ml_smoothing >= 0.0 && self.ml_smoothing.is_finite()) {
            bail!("ml_smoothing must be non-negative, got {}", self.ml_smoothing);
        }
        if let Some(train) = self.train_size {
            if train < self.n * self.m_v {
                bail!("train_size {train} is smaller than n · m_v = {}", self.n * self.m_v);
            }
        }
        if self.test_size == Some(0) {
            bail!("test_size must be at least 1");
        }
        if let Some(total) = self.m_total {
            if total == 0 {
                bail!("m_total must be at least 1");
            }
        }
        Ok(())
    }

    /// Pooled training size `n · m_v`.
    pub fn m(&self) -> usize {
        self.n * self.m_v
    }

    pub fn resolved_m0(&self) -> f64 {
        match self.m0 {
            M0::Heuristic => m0_heuristic(self.m(), self.lr, self.n),
            M0::Value(v) => v,
        }
    }

    pub fn resolved_train_size(&self) -> usize {
        self.train_size.unwrap_or(self.m())
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(data) = &self.data {
            writeln!(f, "data = {}", data.display())?;
        }
        if let Some(label) = &self.label {
            writeln!(f, "label = {label}")?;
        }
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "m_v = {}", self.m_v)?;
        writeln!(f, "t_max = {}", self.t_max)?;
        writeln!(f, "iter = {}", self.iter)?;
        writeln!(f, "lr = {}", self.lr)?;
        writeln!(f, "m0 = {}", self.m0)?;
        writeln!(f, "topology = {}", self.topology)?;
        writeln!(f, "neighborhood = {}", self.neighborhood)?;
        writeln!(f, "partition = {}", self.partition)?;
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "train_size = {}", show_auto(self.train_size))?;
        writeln!(f, "test_size = {}", show_auto(self.test_size))?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "repetitions = {}", self.repetitions)?;
        writeln!(f, "ml_smoothing = {}", self.ml_smoothing)?;
        writeln!(f, "parallel = {}", self.parallel)?;
        writeln!(f, "m_total = {}", show_auto(self.m_total))
    }
}
