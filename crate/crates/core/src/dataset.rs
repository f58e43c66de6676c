//! Labeled tabular datasets: CSV loading, min-max normalization and seeded
//! train/test splitting.
//!
//! Features are stored row-major in one flat buffer. Class labels are dense
//! 0-based indices assigned in order of first appearance in the source file;
//! the original label strings are kept in `class_names`.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    n_features: usize,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking every structural invariant: at least one
    /// example, equal-length finite feature vectors, labels in range and every
    /// class represented.
    pub fn new(
        examples: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if examples.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} examples but {} labels",
                examples.len(),
                labels.len()
            )));
        }
        let n_features = examples[0].len();
        if n_features == 0 {
            return Err(Error::InvalidDataset("examples have no features".into()));
        }
        let mut features = Vec::with_capacity(examples.len() * n_features);
        for (row, example) in examples.iter().enumerate() {
            if example.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    found: example.len(),
                });
            }
            if let Some(bad) = example.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "example {row} has non-finite feature {bad}"
                )));
            }
            features.extend_from_slice(example);
        }
        let mut seen = vec![false; class_names.len()];
        for &label in &labels {
            match seen.get_mut(label) {
                Some(s) => *s = true,
                None => {
                    return Err(Error::InvalidDataset(format!(
                        "label {label} out of range for {} classes",
                        class_names.len()
                    )))
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDataset(format!(
                "class {missing} ({}) has no examples",
                class_names[missing]
            )));
        }
        Ok(Self {
            features,
            labels,
            n_features,
            class_names,
        })
    }

    /// Builds a dataset from string labels, mapping them to dense indices in
    /// first-appearance order.
    pub fn from_labeled<S: AsRef<str>>(examples: Vec<Vec<f64>>, labels: &[S]) -> Result<Self> {
        let mut class_names: Vec<String> = Vec::new();
        let indices = labels
            .iter()
            .map(|l| class_index(&mut class_names, l.as_ref()))
            .collect();
        Self::new(examples, indices, class_names)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn example(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn examples(&self) -> std::slice::ChunksExact<'_, f64> {
        self.features.chunks_exact(self.n_features)
    }

    /// Rows at `indices`, in that order. The class table is inherited
    /// unchanged, so a subset may leave some classes without examples.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.example(i));
            labels.push(self.labels[i]);
        }
        Self {
            features,
            labels,
            n_features: self.n_features,
            class_names: self.class_names.clone(),
        }
    }
}

fn class_index(class_names: &mut Vec<String>, name: &str) -> usize {
    match class_names.iter().position(|c| c == name) {
        Some(i) => i,
        None => {
            class_names.push(name.to_owned());
            class_names.len() - 1
        }
    }
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidConfig("empty label column selector".into()));
        }
        if s.eq_ignore_ascii_case("last") {
            return Ok(LabelColumn::Last);
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_owned()),
        })
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Last => f.write_str("last"),
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

impl Serialize for LabelColumn {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LabelColumn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: LabelColumn,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            label_column: LabelColumn::Last,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    read_csv(file, options)
}

/// Parses comma-delimited rows. Row numbers in errors are 1-based file lines,
/// so a header occupies row 1.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = reader.records();
    let mut header: Option<csv::StringRecord> = None;
    if options.has_header {
        match records.next() {
            Some(record) => header = Some(record.map_err(|e| csv_error(&e, 1))?),
            None => return Err(Error::EmptyDataset),
        }
    }

    let mut width: Option<usize> = header.as_ref().map(|h| h.len());
    let mut label_at: Option<usize> = None;
    let mut examples = Vec::new();
    let mut labels: Vec<String> = Vec::new();

    for (i, record) in records.enumerate() {
        let fallback_row = i + 1 + usize::from(options.has_header);
        let record = record.map_err(|e| csv_error(&e, fallback_row))?;
        let row = record
            .position()
            .map_or(fallback_row, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Parse {
                row,
                message: format!("expected {expected} columns, found {}", record.len()),
            });
        }
        let label_col = match label_at {
            Some(c) => c,
            None => *label_at.insert(resolve_label_column(
                &options.label_column,
                header.as_ref(),
                expected,
            )?),
        };
        if expected < 2 {
            return Err(Error::Parse {
                row,
                message: "a row needs at least one feature and a label".into(),
            });
        }

        let mut features = Vec::with_capacity(expected - 1);
        for (col, cell) in record.iter().enumerate() {
            if col == label_col {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                message: format!("column {}: {cell:?} is not a number", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row,
                    message: format!("column {}: {cell:?} is not finite", col + 1),
                });
            }
            features.push(value);
        }
        examples.push(features);
        labels.push(record[label_col].to_owned());
    }

    if examples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::from_labeled(examples, &labels)
}

fn resolve_label_column(
    selector: &LabelColumn,
    header: Option<&csv::StringRecord>,
    width: usize,
) -> Result<usize> {
    let missing = || Error::MissingLabelColumn(selector.to_string());
    match selector {
        LabelColumn::Last => width.checked_sub(1).ok_or_else(missing),
        LabelColumn::Index(i) if *i < width => Ok(*i),
        LabelColumn::Index(_) => Err(missing()),
        LabelColumn::Name(name) => header
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(missing),
    }
}

fn csv_error(e: &csv::Error, fallback_row: usize) -> Error {
    Error::Parse {
        row: e.position().map_or(fallback_row, |p| p.line() as usize),
        message: e.to_string(),
    }
}

/// Per-feature `(min, max)` pairs used for min-max scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    bounds: Vec<(f64, f64)>,
}

impl NormalizationBounds {
    pub fn fit(data: &Dataset) -> Self {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); data.n_features()];
        for example in data.examples() {
            for (b, &v) in bounds.iter_mut().zip(example) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        Self { bounds }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Scales one feature vector. Constant features map to 0; values outside
    /// the fitted range are not clamped.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.bounds.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.bounds)
            .map(|(&v, &(min, max))| {
                let range = max - min;
                if range > 0.0 {
                    (v - min) / range
                } else {
                    0.0
                }
            })
            .collect())
    }
}

pub fn fit_normalizer(train: &Dataset) -> NormalizationBounds {
    NormalizationBounds::fit(train)
}

pub fn normalize(data: &Dataset, bounds: &NormalizationBounds) -> Result<Dataset> {
    if data.n_features() != bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: bounds.len(),
            found: data.n_features(),
        });
    }
    let mut features = Vec::with_capacity(data.features.len());
    for example in data.examples() {
        features.extend(bounds.apply(example)?);
    }
    Ok(Dataset {
        features,
        labels: data.labels.clone(),
        n_features: data.n_features,
        class_names: data.class_names.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Self {
        Self {
            test_fraction,
            seed,
        }
    }

    /// `ceil(test_fraction * n)`, or an error when that leaves either side of
    /// the split empty.
    pub fn test_size(&self, n: usize) -> Result<usize> {
        let invalid = Error::InvalidSplit {
            n,
            test_fraction: self.test_fraction,
        };
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(invalid);
        }
        // 0.3 * 150 must give 45, not 46
        let size = (self.test_fraction * n as f64 - 1e-9).ceil() as usize;
        if size == 0 || size >= n {
            return Err(invalid);
        }
        Ok(size)
    }
}

/// Seeded shuffle of all indices; the first `test_size` go to the test
/// partition and the rest to training, both in shuffled order.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = split_indices(data.len(), spec)?;
    Ok((data.subset(&train_idx), data.subset(&test_idx)))
}

pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let test_size = spec.test_size(n)?;
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    indices.shuffle(&mut rng);
    let train = indices.split_off(test_size);
    Ok((train, indices))
}
