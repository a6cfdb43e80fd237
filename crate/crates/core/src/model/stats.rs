use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

/// Additive sufficient statistics. The first `classes` entries are the class
/// counts; the layout of the rest belongs to the model that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsVector {
    classes: usize,
    values: Vec<f64>,
}

impl StatsVector {
    pub fn zeros(classes: usize, len: usize) -> Self {
        assert!(classes <= len, "class block longer than the vector");
        Self {
            classes,
            values: vec![0.0; len],
        }
    }

    pub fn from_values(classes: usize, values: Vec<f64>) -> Self {
        assert!(classes <= values.len(), "class block longer than the vector");
        Self { classes, values }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn class_block(&self) -> &[f64] {
        &self.values[..self.classes]
    }

    /// Equivalent sample size: total class-count mass.
    pub fn ess(&self) -> f64 {
        self.class_block().iter().sum()
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &StatsVector, c: f64) {
        self.check_shape(other);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.values {
            *a *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> StatsVector {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// Componentwise average, summed in the given order.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a StatsVector>) -> Option<StatsVector> {
        let mut iter = items.into_iter();
        let mut acc = iter.next()?.clone();
        let mut count = 1usize;
        for s in iter {
            acc += s;
            count += 1;
        }
        acc.scale(1.0 / count as f64);
        Some(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &StatsVector) -> f64 {
        self.check_shape(other);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    fn check_shape(&self, other: &StatsVector) {
        assert!(
            self.classes == other.classes && self.values.len() == other.values.len(),
            "statistics vectors of different shapes"
        );
    }
}

impl AddAssign<&StatsVector> for StatsVector {
    fn add_assign(&mut self, rhs: &StatsVector) {
        self.add_scaled(rhs, 1.0);
    }
}

impl SubAssign<&StatsVector> for StatsVector {
    fn sub_assign(&mut self, rhs: &StatsVector) {
        self.check_shape(rhs);
        for (a, b) in self.values.iter_mut().zip(&rhs.values) {
            *a -= b;
        }
    }
}

impl Add<&StatsVector> for &StatsVector {
    type Output = StatsVector;

    fn add(self, rhs: &StatsVector) -> StatsVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&StatsVector> for &StatsVector {
    type Output = StatsVector;

    fn sub(self, rhs: &StatsVector) -> StatsVector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<f64> for &StatsVector {
    type Output = StatsVector;

    fn mul(self, c: f64) -> StatsVector {
        self.scaled(c)
    }
}
