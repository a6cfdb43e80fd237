use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{GenerativeClassifier, StatsVector, EPS_COUNT, EPS_VARIANCE};
use crate::data::{FeatureSchema, FeatureSpec};
use crate::error::{Error, Result};

/// Naive Bayes with categorical discrete features and univariate Gaussian
/// continuous features.
///
/// Statistics layout: `r` class counts, then one block per feature in schema
/// order. A discrete feature with `r_i` values contributes an `r × r_i` count
/// table (row `y`, column `x_i`); a continuous feature contributes `r` moment
/// triples `(Σ1, Σx, Σx²)`.
#[derive(Debug, Clone)]
pub struct NaiveBayes {
    schema: Arc<FeatureSchema>,
    offsets: Vec<usize>,
    len: usize,
}

impl NaiveBayes {
    pub fn new(schema: Arc<FeatureSchema>) -> Self {
        let r = schema.classes();
        let mut offsets = Vec::with_capacity(schema.d());
        let mut len = r;
        for f in schema.features() {
            offsets.push(len);
            len += match f {
                FeatureSpec::Discrete { cardinality } => r * cardinality,
                FeatureSpec::Continuous => r * 3,
            };
        }
        Self { schema, offsets, len }
    }

    /// Start of feature `i`'s block in the statistics vector.
    pub fn offset(&self, feature: usize) -> usize {
        self.offsets[feature]
    }

    /// One `key = value` line per statistics component.
    pub fn dump_stats(&self, stats: &StatsVector) -> String {
        let v = stats.values();
        let r = self.classes();
        let mut out = String::new();
        for y in 0..r {
            let _ = writeln!(out, "class_count[{}] = {:?}", y + 1, v[y]);
        }
        for (i, f) in self.schema.features().iter().enumerate() {
            let off = self.offsets[i];
            match f {
                FeatureSpec::Discrete { cardinality } => {
                    for y in 0..r {
                        for x in 0..*cardinality {
                            let _ = writeln!(
                                out,
                                "feature[{}].count[y={}][x={}] = {:?}",
                                i + 1,
                                y + 1,
                                x + 1,
                                v[off + y * cardinality + x]
                            );
                        }
                    }
                }
                FeatureSpec::Continuous => {
                    for y in 0..r {
                        for k in 0..3 {
                            let _ = writeln!(out, "feature[{}].m{k}[y={}] = {:?}", i + 1, y + 1, v[off + 3 * y + k]);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureParams {
    /// Row-major `r × cardinality` table of `p(x_i | y)`.
    Categorical {
        cardinality: usize,
        probs: Vec<f64>,
    },
    Gaussian {
        mean: Vec<f64>,
        var: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct NbParams {
    class_probs: Vec<f64>,
    features: Vec<FeatureParams>,
    log_class: Vec<f64>,
    // categorical: log p(x|y); gaussian: per class (log normalizer, 1/(2σ²))
    log_tables: Vec<Vec<f64>>,
}

impl PartialEq for NbParams {
    fn eq(&self, other: &Self) -> bool {
        self.class_probs == other.class_probs && self.features == other.features
    }
}

impl NbParams {
    pub fn class_probs(&self) -> &[f64] {
        &self.class_probs
    }

    pub fn features(&self) -> &[FeatureParams] {
        &self.features
    }

    /// Every parameter in dump order.
    pub fn components(&self) -> Vec<f64> {
        let mut out = self.class_probs.clone();
        for f in &self.features {
            match f {
                FeatureParams::Categorical { probs, .. } => out.extend_from_slice(probs),
                FeatureParams::Gaussian { mean, var } => {
                    for (m, v) in mean.iter().zip(var) {
                        out.push(*m);
                        out.push(*v);
                    }
                }
            }
        }
        out
    }

    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for (y, p) in self.class_probs.iter().enumerate() {
            let _ = writeln!(out, "class_prob[{}] = {:?}", y + 1, p);
        }
        for (i, f) in self.features.iter().enumerate() {
            match f {
                FeatureParams::Categorical { cardinality, probs } => {
                    for (k, p) in probs.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "feature[{}].prob[y={}][x={}] = {:?}",
                            i + 1,
                            k / cardinality + 1,
                            k % cardinality + 1,
                            p
                        );
                    }
                }
                FeatureParams::Gaussian { mean, var } => {
                    for (y, (m, v)) in mean.iter().zip(var).enumerate() {
                        let _ = writeln!(out, "feature[{}].mean[y={}] = {:?}", i + 1, y + 1, m);
                        let _ = writeln!(out, "feature[{}].var[y={}] = {:?}", i + 1, y + 1, v);
                    }
                }
            }
        }
        out
    }
}

/// Parses a `key = value` dump. Blank lines and `#` comments are skipped.
pub fn parse_dump(text: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.rsplit_once('=').ok_or_else(|| Error::Parse {
            line: n + 1,
            message: "expected `key = value`".into(),
        })?;
        let value = value.trim().parse::<f64>().map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push((key.trim().to_string(), value));
    }
    Ok(out)
}

fn check_denominator(value: f64, what: impl FnOnce() -> String) -> Result<()> {
    if value >= EPS_COUNT && value.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateStatistics(format!(
            "{} = {value} (floor {EPS_COUNT})",
            what()
        )))
    }
}

impl GenerativeClassifier for NaiveBayes {
    type Params = NbParams;

    fn schema(&self) -> &Arc<FeatureSchema> {
        &self.schema
    }

    fn stats_len(&self) -> usize {
        self.len
    }

    fn accumulate(&self, stats: &mut StatsVector, x: &[f64], class: usize, weight: f64) {
        let v = stats.values_mut();
        v[class] += weight;
        for (i, (f, &xi)) in self.schema.features().iter().zip(x).enumerate() {
            let off = self.offsets[i];
            match f {
                FeatureSpec::Discrete { cardinality } => {
                    v[off + class * cardinality + xi as usize] += weight;
                }
                FeatureSpec::Continuous => {
                    let b = off + 3 * class;
                    v[b] += weight;
                    v[b + 1] += weight * xi;
                    v[b + 2] += weight * xi * xi;
                }
            }
        }
    }

    fn param_map(&self, stats: &StatsVector) -> Result<NbParams> {
        let v = stats.values();
        let r = self.classes();
        let total: f64 = v[..r].iter().sum();
        check_denominator(total, || "class count total".into())?;
        let class_probs: Vec<f64> = v[..r].iter().map(|c| c / total).collect();
        let log_class = class_probs.iter().map(|p| p.ln()).collect();

        let mut features = Vec::with_capacity(self.schema.d());
        let mut log_tables = Vec::with_capacity(self.schema.d());
        for (i, f) in self.schema.features().iter().enumerate() {
            let off = self.offsets[i];
            match *f {
                FeatureSpec::Discrete { cardinality } => {
                    let mut probs = Vec::with_capacity(r * cardinality);
                    for y in 0..r {
                        let row = &v[off + y * cardinality..off + (y + 1) * cardinality];
                        let sum: f64 = row.iter().sum();
                        check_denominator(sum, || format!("feature {} class {} count total", i + 1, y + 1))?;
                        probs.extend(row.iter().map(|c| c / sum));
                    }
                    log_tables.push(probs.iter().map(|p| p.ln()).collect());
                    features.push(FeatureParams::Categorical { cardinality, probs });
                }
                FeatureSpec::Continuous => {
                    let mut mean = Vec::with_capacity(r);
                    let mut var = Vec::with_capacity(r);
                    let mut table = Vec::with_capacity(2 * r);
                    for y in 0..r {
                        let b = off + 3 * y;
                        let (s0, s1, s2) = (v[b], v[b + 1], v[b + 2]);
                        check_denominator(s0, || format!("feature {} class {} zeroth moment", i + 1, y + 1))?;
                        let mu = s1 / s0;
                        let sigma2 = (s2 / s0 - mu * mu).max(EPS_VARIANCE);
                        if !(mu.is_finite() && sigma2.is_finite()) {
                            return Err(Error::DegenerateStatistics(format!(
                                "feature {} class {} moments are not finite",
                                i + 1,
                                y + 1
                            )));
                        }
                        mean.push(mu);
                        var.push(sigma2);
                        table.push(-0.5 * (2.0 * PI * sigma2).ln());
                        table.push(0.5 / sigma2);
                    }
                    log_tables.push(table);
                    features.push(FeatureParams::Gaussian { mean, var });
                }
            }
        }
        Ok(NbParams {
            class_probs,
            features,
            log_class,
            log_tables,
        })
    }

    fn log_joint(&self, params: &NbParams, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&params.log_class);
        for ((f, table), &xi) in params.features.iter().zip(&params.log_tables).zip(x) {
            match f {
                FeatureParams::Categorical { cardinality, .. } => {
                    let k = xi as usize;
                    for (y, o) in out.iter_mut().enumerate() {
                        *o += table[y * cardinality + k];
                    }
                }
                FeatureParams::Gaussian { mean, .. } => {
                    for (y, o) in out.iter_mut().enumerate() {
                        let dx = xi - mean[y];
                        *o += table[2 * y] - dx * dx * table[2 * y + 1];
                    }
                }
            }
        }
    }

    fn project(&self, stats: &mut StatsVector) {
        let r = self.classes();
        let v = stats.values_mut();
        for c in &mut v[..r] {
            *c = c.max(EPS_COUNT);
        }
        for (i, f) in self.schema.features().iter().enumerate() {
            let off = self.offsets[i];
            match f {
                FeatureSpec::Discrete { cardinality } => {
                    for c in &mut v[off..off + r * cardinality] {
                        *c = c.max(EPS_COUNT);
                    }
                }
                FeatureSpec::Continuous => {
                    for y in 0..r {
                        let b = off + 3 * y;
                        let s0 = v[b].max(EPS_COUNT);
                        v[b] = s0;
                        // smallest second moment giving variance EPS_VARIANCE
                        let required = s0 * EPS_VARIANCE + v[b + 1] * v[b + 1] / s0;
                        if v[b + 2].is_nan() || v[b + 2] < required {
                            v[b + 2] = required;
                        }
                    }
                }
            }
        }
    }

    fn uniform_init(&self, m0: f64) -> Result<StatsVector> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "equivalent sample size must be positive, got {m0}"
            )));
        }
        let r = self.classes();
        let per_class = m0 / r as f64;
        let mut s = self.zero_stats();
        let v = s.values_mut();
        v[..r].fill(per_class);
        for (i, f) in self.schema.features().iter().enumerate() {
            let off = self.offsets[i];
            match f {
                FeatureSpec::Discrete { cardinality } => {
                    v[off..off + r * cardinality].fill(per_class / *cardinality as f64);
                }
                FeatureSpec::Continuous => {
                    // moments of a standard normal: mean 0, variance 1
                    for y in 0..r {
                        let b = off + 3 * y;
                        v[b] = per_class;
                        v[b + 1] = 0.0;
                        v[b + 2] = per_class;
                    }
                }
            }
        }
        Ok(s)
    }
}
