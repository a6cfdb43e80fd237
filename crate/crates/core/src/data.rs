//! Datasets with mixed discrete/continuous features, CSV ingestion and
//! schema inference.
//!
//! Discrete values and class labels are stored as 0-based category indices.
//! A discrete value lives in the instance row as an integral `f64`, which
//! keeps every instance a plain `&[f64]` regardless of the feature types.

use std::collections::{BTreeSet, HashMap};
use std::io;
use std::path::Path;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// Columns with at most this many distinct tokens are treated as discrete.
pub const MAX_DISCRETE_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSpec {
    Discrete { cardinality: usize },
    Continuous,
}

impl FeatureSpec {
    pub fn is_discrete(&self) -> bool {
        matches!(self, FeatureSpec::Discrete { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
    classes: usize,
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>, classes: usize) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Schema("at least one feature is required".into()));
        }
        if classes < 2 {
            return Err(Error::Schema(format!(
                "class cardinality must be at least 2, got {classes}"
            )));
        }
        for (i, f) in features.iter().enumerate() {
            if let FeatureSpec::Discrete { cardinality } = f {
                if *cardinality < 2 {
                    return Err(Error::Schema(format!(
                        "feature {} has cardinality {cardinality}, expected at least 2",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { features, classes })
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    /// Number of features `d`.
    pub fn d(&self) -> usize {
        self.features.len()
    }

    /// Number of class labels `r`.
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn validate_instance(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d() {
            return Err(Error::InvalidInstance(format!(
                "expected {} features, got {}",
                self.d(),
                x.len()
            )));
        }
        for (i, (spec, &v)) in self.features.iter().zip(x).enumerate() {
            match spec {
                FeatureSpec::Discrete { cardinality } => {
                    if !(v >= 0.0 && v < *cardinality as f64 && v.fract() == 0.0) {
                        return Err(Error::InvalidInstance(format!(
                            "feature {} value {v} outside support 0..{cardinality}",
                            i + 1
                        )));
                    }
                }
                FeatureSpec::Continuous => {
                    if !v.is_finite() {
                        return Err(Error::InvalidInstance(format!(
                            "feature {} value {v} is not finite",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validate_label(&self, y: usize) -> Result<()> {
        if y >= self.classes {
            return Err(Error::InvalidInstance(format!("label {y} outside 0..{}", self.classes)));
        }
        Ok(())
    }
}

/// Labeled instances sharing one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<FeatureSchema>,
    values: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(schema: Arc<FeatureSchema>, rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidInstance(format!(
                "{} instances but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * schema.d());
        for (row, &y) in rows.iter().zip(&labels) {
            schema.validate_instance(row)?;
            schema.validate_label(y)?;
            values.extend_from_slice(row);
        }
        Ok(Self { schema, values, labels })
    }

    pub fn empty(schema: Arc<FeatureSchema>) -> Self {
        Self {
            schema,
            values: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Arc<FeatureSchema> {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn instance(&self, i: usize) -> &[f64] {
        let d = self.schema.d();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn instances(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.schema.d())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], usize)> + '_ {
        self.instances().zip(self.labels.iter().copied())
    }

    /// Instances at `indices`, in that order. Panics on out-of-range indices.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let d = self.schema.d();
        let mut values = Vec::with_capacity(indices.len() * d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.instance(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            schema: Arc::clone(&self.schema),
            values,
            labels,
        }
    }

    /// Concatenation of datasets sharing a schema.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Dataset>) -> Result<Dataset> {
        let mut iter = parts.into_iter();
        let first = iter.next().ok_or(Error::NoInstances)?;
        let mut out = first.clone();
        for part in iter {
            if part.schema != out.schema {
                return Err(Error::Schema(
                    "cannot concatenate datasets with different schemas".into(),
                ));
            }
            out.values.extend_from_slice(&part.values);
            out.labels.extend_from_slice(&part.labels);
        }
        Ok(out)
    }

    /// Re-encodes a raw table with an existing schema and codebook.
    pub fn from_table(table: &RawTable, schema: Arc<FeatureSchema>, codebook: &Codebook) -> Result<Dataset> {
        if table.rows.is_empty() {
            return Err(Error::NoInstances);
        }
        let columns = table.feature_columns();
        if columns.len() != schema.d() || codebook.levels.len() != schema.d() {
            return Err(Error::Schema(format!(
                "table has {} feature columns, schema expects {}",
                columns.len(),
                schema.d()
            )));
        }
        let level_maps: Vec<Option<HashMap<&str, usize>>> = codebook
            .levels
            .iter()
            .map(|l| {
                l.as_ref()
                    .map(|levels| levels.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect())
            })
            .collect();
        let class_map: HashMap<&str, usize> = codebook
            .classes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let d = schema.d();
        let mut values = Vec::with_capacity(table.rows.len() * d);
        let mut labels = Vec::with_capacity(table.rows.len());
        for (r, row) in table.rows.iter().enumerate() {
            for (j, &c) in columns.iter().enumerate() {
                let token = row[c].as_str();
                let v = match (&schema.features[j], &level_maps[j]) {
                    (FeatureSpec::Discrete { .. }, Some(map)) => {
                        *map.get(token)
                            .ok_or_else(|| table.cell_error(r, c, "unknown category"))? as f64
                    }
                    (FeatureSpec::Continuous, None) => parse_real(token)
                        .ok_or_else(|| table.cell_error(r, c, &format!("non-numeric token {token:?}")))?,
                    _ => return Err(Error::Schema("codebook does not match schema".into())),
                };
                values.push(v);
            }
            let token = row[table.label].as_str();
            let y = *class_map
                .get(token)
                .ok_or_else(|| table.cell_error(r, table.label, "unknown class label"))?;
            labels.push(y);
        }
        Ok(Dataset { schema, values, labels })
    }
}

/// How to find the label column in a CSV header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl From<&str> for LabelColumn {
    /// A bare integer is a 0-based column index, anything else a header name.
    fn from(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

/// Untyped CSV cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Position of the label column in `header`.
    pub label: usize,
}

impl RawTable {
    fn feature_columns(&self) -> Vec<usize> {
        (0..self.header.len()).filter(|&c| c != self.label).collect()
    }

    fn cell_error(&self, row: usize, column: usize, message: &str) -> Error {
        Error::Cell {
            row: row + 1,
            column: self.header[column].clone(),
            message: message.to_string(),
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(io::BufReader::new(file), label)
}

pub fn read_csv(reader: impl io::Read, label: &LabelColumn) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label = match label {
        LabelColumn::Index(i) if *i < header.len() => *i,
        LabelColumn::Index(i) => return Err(Error::MissingLabelColumn(i.to_string())),
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingLabelColumn(name.clone()))?,
    };
    let mut rows = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row: r + 1,
                expected: header.len(),
                found: record.len(),
            });
        }
        let row: Vec<String> = record.iter().map(str::to_string).collect();
        if let Some(c) = row.iter().position(String::is_empty) {
            return Err(Error::Cell {
                row: r + 1,
                column: header[c].clone(),
                message: "empty cell (missing values are not supported)".into(),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::NoInstances);
    }
    Ok(RawTable { header, rows, label })
}

/// Original tokens behind the category indices of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub feature_names: Vec<String>,
    pub label_name: String,
    /// Sorted category tokens for discrete features, `None` for continuous ones.
    pub levels: Vec<Option<Vec<String>>>,
    pub classes: Vec<String>,
}

fn parse_real(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Sorts tokens numerically when all of them are numbers, lexicographically otherwise.
fn sort_levels(tokens: BTreeSet<&str>) -> Vec<String> {
    let mut levels: Vec<&str> = tokens.into_iter().collect();
    let numeric: Option<Vec<f64>> = levels.iter().map(|t| parse_real(t)).collect();
    if let Some(nums) = numeric {
        let mut paired: Vec<(f64, &str)> = nums.into_iter().zip(levels).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        levels = paired.into_iter().map(|(_, t)| t).collect();
    }
    levels.into_iter().map(str::to_string).collect()
}

/// Types every column: at most ten distinct tokens makes a column discrete,
/// anything else must parse as finite reals.
pub fn infer_schema(table: &RawTable) -> Result<(Dataset, Codebook)> {
    if table.rows.is_empty() {
        return Err(Error::NoInstances);
    }
    let columns = table.feature_columns();
    if columns.is_empty() {
        return Err(Error::Schema("no feature columns".into()));
    }

    let mut specs = Vec::with_capacity(columns.len());
    let mut levels = Vec::with_capacity(columns.len());
    for &c in &columns {
        let mut distinct = BTreeSet::new();
        for row in &table.rows {
            distinct.insert(row[c].as_str());
            if distinct.len() > MAX_DISCRETE_LEVELS {
                break;
            }
        }
        if distinct.len() > MAX_DISCRETE_LEVELS {
            specs.push(FeatureSpec::Continuous);
            levels.push(None);
        } else if distinct.len() < 2 {
            return Err(Error::Schema(format!(
                "column {:?} has a single distinct value",
                table.header[c]
            )));
        } else {
            specs.push(FeatureSpec::Discrete {
                cardinality: distinct.len(),
            });
            levels.push(Some(sort_levels(distinct)));
        }
    }

    let classes = sort_levels(table.rows.iter().map(|r| r[table.label].as_str()).collect());
    if classes.len() < 2 {
        return Err(Error::Schema(format!(
            "label column {:?} has fewer than 2 classes",
            table.header[table.label]
        )));
    }

    let schema = Arc::new(FeatureSchema::new(specs, classes.len())?);
    let codebook = Codebook {
        feature_names: columns.iter().map(|&c| table.header[c].clone()).collect(),
        label_name: table.header[table.label].clone(),
        levels,
        classes,
    };
    let dataset = Dataset::from_table(table, schema, &codebook)?;
    Ok((dataset, codebook))
}

/// Codebook with index tokens `1..=r_i` and `1..=r`, for datasets built in memory.
pub fn default_codebook(schema: &FeatureSchema) -> Codebook {
    let idx = |k: usize| (1..=k).map(|i| i.to_string()).collect::<Vec<_>>();
    Codebook {
        feature_names: (1..=schema.d()).map(|i| format!("x{i}")).collect(),
        label_name: "y".into(),
        levels: schema
            .features()
            .iter()
            .map(|f| match f {
                FeatureSpec::Discrete { cardinality } => Some(idx(*cardinality)),
                FeatureSpec::Continuous => None,
            })
            .collect(),
        classes: idx(schema.classes()),
    }
}

/// Writes the dataset with its original tokens; the label is the last column.
pub fn write_csv(dataset: &Dataset, codebook: &Codebook, writer: impl io::Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = codebook.feature_names.clone();
    header.push(codebook.label_name.clone());
    wtr.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for (x, y) in dataset.iter() {
        record.clear();
        for (v, lv) in x.iter().zip(&codebook.levels) {
            record.push(match lv {
                Some(levels) => levels[*v as usize].clone(),
                None => v.to_string(),
            });
        }
        record.push(codebook.classes[y].clone());
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}

/// Disjoint uniformly random index sets of the requested sizes.
pub fn split_indices(m: usize, train: usize, test: usize, rng: &mut impl Rng) -> Result<(Vec<usize>, Vec<usize>)> {
    let total = train
        .checked_add(test)
        .ok_or_else(|| Error::InvalidArgument("split sizes overflow".into()))?;
    if total > m {
        return Err(Error::InsufficientData {
            requested: total,
            available: m,
        });
    }
    let mut drawn = index::sample(rng, m, total).into_vec();
    let test_idx = drawn.split_off(train);
    Ok((drawn, test_idx))
}

pub fn train_test_split(
    dataset: &Dataset,
    train: usize,
    test: usize,
    rng: &mut impl Rng,
) -> Result<(Dataset, Dataset)> {
    let (tr, te) = split_indices(dataset.len(), train, test, rng)?;
    Ok((dataset.subset(&tr), dataset.subset(&te)))
}
