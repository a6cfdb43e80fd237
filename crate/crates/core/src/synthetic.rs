//! Synthetic datasets for tests, benchmarks and the `gendata` command.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::data::{Dataset, FeatureSchema, FeatureSpec};
use crate::error::{Error, Result};

fn check(m: usize, classes: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::NoInstances);
    }
    if classes < 2 {
        return Err(Error::InvalidArgument("at least two classes are required".into()));
    }
    Ok(())
}

/// Centre of class `c` for `d`-dimensional blobs: `separation` along axis
/// `c mod d`, shifted diagonally by `separation · (c div d)`.
pub fn blob_center(c: usize, d: usize, separation: f64) -> Vec<f64> {
    let shift = separation * (c / d) as f64;
    (0..d)
        .map(|j| shift + if j == c % d { separation } else { 0.0 })
        .collect()
}

/// Isotropic unit-variance Gaussian blobs, labels drawn uniformly.
pub fn gaussian_blobs(m: usize, d: usize, classes: usize, separation: f64, rng: &mut impl Rng) -> Result<Dataset> {
    check(m, classes)?;
    if d == 0 {
        return Err(Error::InvalidArgument("at least one feature is required".into()));
    }
    let schema = Arc::new(FeatureSchema::new(vec![FeatureSpec::Continuous; d], classes)?);
    let centers: Vec<Vec<f64>> = (0..classes).map(|c| blob_center(c, d, separation)).collect();
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let y = rng.random_range(0..classes);
        rows.push(centers[y].iter().map(|c| c + noise.sample(rng)).collect());
        labels.push(y);
    }
    Dataset::new(schema, rows, labels)
}

/// Mixed schema: `discrete` categorical features with 2, 3, 4, 2, ... levels
/// followed by `continuous` Gaussian features; class-conditional tables and
/// moments are drawn at random.
pub fn mixed(m: usize, discrete: usize, continuous: usize, classes: usize, rng: &mut impl Rng) -> Result<Dataset> {
    check(m, classes)?;
    let mut features: Vec<FeatureSpec> = (0..discrete)
        .map(|j| FeatureSpec::Discrete { cardinality: 2 + j % 3 })
        .collect();
    features.extend(std::iter::repeat_n(FeatureSpec::Continuous, continuous));
    let schema = Arc::new(FeatureSchema::new(features.clone(), classes)?);

    let weight = Uniform::new(0.2, 1.0).expect("valid range");
    let spread = Uniform::new(0.5, 1.5).expect("valid range");
    let location = Normal::new(0.0, 1.5).expect("valid normal");

    // per feature, per class: cumulative categorical weights or (mean, sd)
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(features.len());
    for f in &features {
        let per_class = (0..classes)
            .map(|_| match f {
                FeatureSpec::Discrete { cardinality } => {
                    let w: Vec<f64> = (0..*cardinality).map(|_| weight.sample(rng)).collect();
                    let total: f64 = w.iter().sum();
                    w.iter()
                        .scan(0.0, |acc, v| {
                            *acc += v / total;
                            Some(*acc)
                        })
                        .collect()
                }
                FeatureSpec::Continuous => vec![location.sample(rng), spread.sample(rng)],
            })
            .collect();
        tables.push(per_class);
    }

    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let y = rng.random_range(0..classes);
        let row = features
            .iter()
            .zip(&tables)
            .map(|(f, t)| match f {
                FeatureSpec::Discrete { cardinality } => {
                    let u: f64 = rng.random();
                    t[y].iter().position(|&c| u < c).unwrap_or(cardinality - 1) as f64
                }
                FeatureSpec::Continuous => t[y][0] + t[y][1] * unit.sample(rng),
            })
            .collect();
        rows.push(row);
        labels.push(y);
    }
    Dataset::new(schema, rows, labels)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn blobs_shape() {
        let ds = gaussian_blobs(100, 3, 2, 5.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(ds.len(), 100);
        assert_eq!(ds.schema().d(), 3);
        assert_eq!(blob_center(1, 2, 5.0), vec![0.0, 5.0]);
        assert_eq!(blob_center(2, 2, 5.0), vec![10.0, 5.0]);
    }

    #[test]
    fn mixed_is_seeded() {
        let a = mixed(50, 2, 1, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = mixed(50, 2, 1, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.schema().features()[1], FeatureSpec::Discrete { cardinality: 3 });
        assert!(mixed(0, 1, 1, 2, &mut ChaCha8Rng::seed_from_u64(4)).is_err());
    }
}
