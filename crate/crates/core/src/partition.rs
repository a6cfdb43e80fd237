//! Splitting a global training set into per-node datasets.
//!
//! Every mode first draws a uniformly random global sample of `n · m_v`
//! indices, so the union of all node datasets is always an i.i.d. sample even
//! when the individual nodes are strongly skewed.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionMode {
    #[default]
    Iid,
    /// Nodes hold contiguous slices of the data sorted along the first
    /// principal component.
    DriftX,
    /// Nodes hold a single class whenever class counts allow it.
    DriftY,
    /// Single-class nodes, each covering a contiguous region of its class.
    DriftXy,
}

impl FromStr for PartitionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(PartitionMode::Iid),
            "drift_x" => Ok(PartitionMode::DriftX),
            "drift_y" => Ok(PartitionMode::DriftY),
            "drift_xy" => Ok(PartitionMode::DriftXy),
            _ => Err(Error::InvalidArgument(format!("unknown partition mode {s:?}"))),
        }
    }
}

impl fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionMode::Iid => "iid",
            PartitionMode::DriftX => "drift_x",
            PartitionMode::DriftY => "drift_y",
            PartitionMode::DriftXy => "drift_xy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub mode: PartitionMode,
    pub m_v: usize,
    /// Global dataset indices held by each node.
    pub assignment: Vec<Vec<usize>>,
}

impl PartitionPlan {
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Union of all node blocks, in node order.
    pub fn global_sample(&self) -> Vec<usize> {
        self.assignment.concat()
    }

    pub fn local_datasets(&self, dataset: &Dataset) -> Vec<Dataset> {
        self.assignment.iter().map(|b| dataset.subset(b)).collect()
    }

    /// `node,global_index` rows with 1-based node ids and 0-based indices.
    pub fn write_csv(&self, writer: impl io::Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["node", "global_index"])?;
        for (v, block) in self.assignment.iter().enumerate() {
            for i in block {
                wtr.write_record([(v + 1).to_string(), i.to_string()])?;
            }
        }
        wtr.flush().map_err(|source| Error::Io {
            path: "<partition plan>".into(),
            source,
        })
    }
}

pub fn split(
    mode: PartitionMode,
    dataset: &Dataset,
    n: usize,
    m_v: usize,
    rng: &mut impl Rng,
) -> Result<PartitionPlan> {
    match mode {
        PartitionMode::Iid => split_iid(dataset, n, m_v, rng),
        PartitionMode::DriftX => split_drift_x(dataset, n, m_v, rng),
        PartitionMode::DriftY => split_drift_y(dataset, n, m_v, rng),
        PartitionMode::DriftXy => split_drift_xy(dataset, n, m_v, rng),
    }
}

fn draw_sample(dataset: &Dataset, n: usize, m_v: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    if n == 0 || m_v == 0 {
        return Err(Error::InvalidArgument(
            "node count and local size must be positive".into(),
        ));
    }
    let total = n
        .checked_mul(m_v)
        .ok_or_else(|| Error::InvalidArgument("n · m_v overflows".into()))?;
    if total > dataset.len() {
        return Err(Error::InsufficientData {
            requested: total,
            available: dataset.len(),
        });
    }
    Ok(index::sample(rng, dataset.len(), total).into_vec())
}

fn blocks(mode: PartitionMode, m_v: usize, ordered: Vec<usize>) -> PartitionPlan {
    PartitionPlan {
        mode,
        m_v,
        assignment: ordered.chunks(m_v).map(<[usize]>::to_vec).collect(),
    }
}

pub fn split_iid(dataset: &Dataset, n: usize, m_v: usize, rng: &mut impl Rng) -> Result<PartitionPlan> {
    // index::sample returns the draw in random order already
    let sample = draw_sample(dataset, n, m_v, rng)?;
    Ok(blocks(PartitionMode::Iid, m_v, sample))
}

/// Centres every column and scales it to unit variance when the variance is positive.
pub fn standardize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let d = first.len();
    let m = rows.len() as f64;
    let mut out = rows.to_vec();
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / m;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / m;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        for r in &mut out {
            r[j] = (r[j] - mean) / scale;
        }
    }
    out
}

fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = rows[0].len();
    let m = rows.len() as f64;
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        for a in 0..d {
            let da = r[a] - means[a];
            for b in a..d {
                cov[a][b] += da * (r[b] - means[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            cov[a][b] /= m;
            cov[b][a] = cov[a][b];
        }
    }
    cov
}

const PCA_TOLERANCE: f64 = 1e-9;
const PCA_MAX_ITERATIONS: usize = 10_000;

/// Leading eigenvector of the empirical covariance of `rows`, by power
/// iteration. Stops when the eigenpair residual `‖Cv − λv‖` drops below
/// `1e-9 · λ`. The sign makes the largest-magnitude coordinate positive.
pub fn first_principal_component(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData {
            requested: 2,
            available: rows.len(),
        });
    }
    let cov = covariance(rows);
    let d = cov.len();
    let scale = cov.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::ZeroCovariance);
    }

    let mul = |v: &[f64]| -> Vec<f64> {
        cov.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    // fixed generic start; falls back to the largest column if it maps to zero
    let probe: Vec<f64> = (0..d).map(|j| 1.0 / ((j + 1) as f64).sqrt()).collect();
    let mut v = mul(&probe);
    if norm(&v) <= f64::EPSILON * scale {
        let start = (0..d)
            .max_by(|&a, &b| norm(&cov[a]).total_cmp(&norm(&cov[b])))
            .expect("d ≥ 1");
        v = cov[start].clone();
    }
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    for _ in 0..PCA_MAX_ITERATIONS {
        let w = mul(&v);
        let lambda: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        let residual = norm(&w.iter().zip(&v).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
        let wn = norm(&w);
        if wn == 0.0 {
            break;
        }
        v = w.into_iter().map(|x| x / wn).collect();
        if residual <= PCA_TOLERANCE * lambda.abs() {
            break;
        }
    }

    let pivot = (0..d)
        .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
        .expect("d ≥ 1");
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(v)
}

/// Projections of the standardized rows onto their first principal component.
fn pca_projections(dataset: &Dataset, indices: &[usize]) -> Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = indices.iter().map(|&i| dataset.instance(i).to_vec()).collect();
    let z = standardize(&rows);
    let pc = first_principal_component(&z)?;
    Ok(z.iter().map(|r| r.iter().zip(&pc).map(|(a, b)| a * b).sum()).collect())
}

/// Stable sort of `indices` by `keys` (aligned with `indices`).
fn sort_by_keys(indices: &[usize], keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    order.into_iter().map(|k| indices[k]).collect()
}

pub fn split_drift_x(dataset: &Dataset, n: usize, m_v: usize, rng: &mut impl Rng) -> Result<PartitionPlan> {
    let sample = draw_sample(dataset, n, m_v, rng)?;
    let proj = pca_projections(dataset, &sample)?;
    Ok(blocks(PartitionMode::DriftX, m_v, sort_by_keys(&sample, &proj)))
}

/// Fills node after node, node `v` starting from class `v mod r`; an
/// exhausted pool hands over to the next class in cyclic order.
fn fill_by_class(mode: PartitionMode, n: usize, m_v: usize, classes: usize, pools: Vec<Vec<usize>>) -> PartitionPlan {
    let mut cursors = vec![0usize; classes];
    let mut assignment = Vec::with_capacity(n);
    for v in 0..n {
        let mut block = Vec::with_capacity(m_v);
        let mut c = v % classes;
        while block.len() < m_v {
            let pool = &pools[c];
            let take = (m_v - block.len()).min(pool.len() - cursors[c]);
            block.extend_from_slice(&pool[cursors[c]..cursors[c] + take]);
            cursors[c] += take;
            c = (c + 1) % classes;
        }
        assignment.push(block);
    }
    PartitionPlan { mode, m_v, assignment }
}

fn class_pools(dataset: &Dataset, sample: &[usize]) -> Vec<Vec<usize>> {
    let mut pools = vec![Vec::new(); dataset.schema().classes()];
    for &i in sample {
        pools[dataset.label(i)].push(i);
    }
    pools
}

pub fn split_drift_y(dataset: &Dataset, n: usize, m_v: usize, rng: &mut impl Rng) -> Result<PartitionPlan> {
    let sample = draw_sample(dataset, n, m_v, rng)?;
    let pools = class_pools(dataset, &sample);
    Ok(fill_by_class(PartitionMode::DriftY, n, m_v, pools.len(), pools))
}

pub fn split_drift_xy(dataset: &Dataset, n: usize, m_v: usize, rng: &mut impl Rng) -> Result<PartitionPlan> {
    let sample = draw_sample(dataset, n, m_v, rng)?;
    let proj = pca_projections(dataset, &sample)?;
    let key: std::collections::HashMap<usize, f64> = sample.iter().copied().zip(proj).collect();
    let pools = class_pools(dataset, &sample)
        .into_iter()
        .map(|pool| {
            let keys: Vec<f64> = pool.iter().map(|i| key[i]).collect();
            sort_by_keys(&pool, &keys)
        })
        .collect::<Vec<_>>();
    Ok(fill_by_class(PartitionMode::DriftXy, n, m_v, pools.len(), pools))
}
