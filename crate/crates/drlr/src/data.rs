//! Synthetic data generation, CSV ingestion, and train/test splitting.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::la::dot;
use crate::loss::logistic;
use crate::rng::{mix_seed, StreamRng, STREAM_BETA, STREAM_DATA, STREAM_SPLIT};
use crate::types::{Dataset, Label, LabeledSample};

/// True weight vector behind a synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaTrue {
    /// An explicit vector of length n.
    Explicit(Vec<f64>),
    /// (10, 0, ..., 0): a strong signal on the first axis.
    FirstAxis10,
    /// A fresh uniform draw from the unit sphere, resolved from the seed.
    UniformSphere,
}

/// Seeded recipe for a synthetic dataset: features are standard normal in
/// n dimensions and labels follow the logistic model
/// P(y = +1 | x) = 1 / (1 + exp(-<beta_true, x>)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub beta_true: BetaTrue,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n: usize, beta_true: BetaTrue, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if let BetaTrue::Explicit(b) = &beta_true {
            if b.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: b.len(),
                });
            }
            if b.iter().any(|v| !v.is_finite()) {
                return Err(Error::non_finite("beta_true"));
            }
        }
        Ok(SyntheticSpec { n, beta_true, seed })
    }

    /// The concrete true weight vector. Sphere draws are resolved
    /// deterministically from (seed, stream 0): n polar-method normals,
    /// normalized; the all-but-impossible near-zero draw is rejected and
    /// redrawn.
    pub fn resolve_beta(&self) -> Vec<f64> {
        match &self.beta_true {
            BetaTrue::Explicit(b) => b.clone(),
            BetaTrue::FirstAxis10 => {
                let mut b = vec![0.0; self.n];
                b[0] = 10.0;
                b
            }
            BetaTrue::UniformSphere => {
                let mut rng = StreamRng::new(self.seed, STREAM_BETA);
                loop {
                    let b: Vec<f64> = (0..self.n).map(|_| rng.normal()).collect();
                    let nrm = dot(&b, &b).sqrt();
                    if nrm > 1e-12 {
                        return b.iter().map(|v| v / nrm).collect();
                    }
                }
            }
        }
    }

    /// A copy of this spec with its seed replaced by the (seed, salt) child
    /// seed; used to fan a master seed out over trials.
    pub fn with_child_seed(&self, salt: u64) -> SyntheticSpec {
        SyntheticSpec {
            n: self.n,
            beta_true: self.beta_true.clone(),
            seed: mix_seed(self.seed, salt),
        }
    }
}

/// Draws `count` samples from the recipe's model. Per sample the stream emits
/// the n feature normals first, then one uniform for the label, so the
/// byte-level output is pinned by (seed, count).
pub fn generate(spec: &SyntheticSpec, count: usize) -> Result<Dataset> {
    if count == 0 {
        return Err(Error::invalid("count", "must draw at least one sample"));
    }
    let beta = spec.resolve_beta();
    let mut rng = StreamRng::new(spec.seed, STREAM_DATA);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let x: Vec<f64> = (0..spec.n).map(|_| rng.normal()).collect();
        let p = logistic(dot(&beta, &x));
        let y = if rng.uniform() < p {
            Label::Plus
        } else {
            Label::Minus
        };
        samples.push(LabeledSample::new(x, y)?);
    }
    Dataset::new(samples)
}

/// Selects the label column of a CSV file by header name or 0-based index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

/// CSV ingestion schema.
///
/// Labels: with `label_map` set, the two tokens map to -1 and +1 in order;
/// rows with any other token are skipped when `filter_other_labels` is set
/// (the pairwise-digit case) and rejected otherwise. Without a map the file
/// must contain exactly two distinct tokens, ordered numerically when both
/// parse as numbers and lexicographically otherwise; the smaller becomes -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub label_column: ColumnRef,
    pub label_map: Option<(String, String)>,
    pub filter_other_labels: bool,
    pub standardize: bool,
    pub has_header: bool,
}

impl CsvSchema {
    pub fn new(label_column: ColumnRef) -> Self {
        CsvSchema {
            label_column,
            label_map: None,
            filter_other_labels: false,
            standardize: false,
            has_header: false,
        }
    }
}

fn order_tokens(a: &str, b: &str) -> (String, String) {
    let (na, nb) = (a.parse::<f64>(), b.parse::<f64>());
    let a_first = match (na, nb) {
        (Ok(x), Ok(y)) => x <= y,
        _ => a <= b,
    };
    if a_first {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Loads a dataset from a CSV file. Feature cells must parse as finite
/// numbers; empty cells are reported as missing values with their row and
/// column. Standardization here uses the loaded set's own statistics; for
/// leakage-free pipelines fit a [`Standardizer`] on the training split
/// instead.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let headers: Vec<String> = if schema.has_header {
        reader.headers()?.iter().map(|h| h.to_string()).collect()
    } else {
        Vec::new()
    };

    let label_idx = match &schema.label_column {
        ColumnRef::Index(i) => *i,
        ColumnRef::Name(name) => headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::invalid(
                "label_column",
                format!("no header named `{name}` (headers: {headers:?})"),
            )
        })?,
    };

    let column_name =
        |j: usize| -> String { headers.get(j).cloned().unwrap_or_else(|| j.to_string()) };

    // First pass: raw rows with string labels, row-indexed validation.
    let mut rows: Vec<(Vec<f64>, String)> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record?;
        let w = match width {
            Some(w) => w,
            None => {
                if record.len() <= label_idx {
                    return Err(Error::invalid(
                        "label_column",
                        format!(
                            "index {label_idx} out of range for {} columns",
                            record.len()
                        ),
                    ));
                }
                width = Some(record.len());
                record.len()
            }
        };
        if record.len() != w {
            return Err(Error::CsvParse {
                row,
                column: String::from("*"),
                message: format!("expected {w} fields, found {}", record.len()),
            });
        }
        let label = record.get(label_idx).unwrap_or("").to_string();
        if label.is_empty() {
            return Err(Error::MissingValue {
                row,
                column: column_name(label_idx),
            });
        }
        let mut x = Vec::with_capacity(w - 1);
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row,
                    column: column_name(j),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::CsvParse {
                row,
                column: column_name(j),
                message: format!("unparseable numeric cell `{cell}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::CsvParse {
                    row,
                    column: column_name(j),
                    message: format!("non-finite value `{cell}`"),
                });
            }
            x.push(v);
        }
        rows.push((x, label));
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    // Resolve the label mapping.
    let (neg, pos) = match &schema.label_map {
        Some((neg, pos)) => (neg.clone(), pos.clone()),
        None => {
            let mut seen: BTreeMap<String, usize> = BTreeMap::new();
            for (_, label) in &rows {
                *seen.entry(label.clone()).or_insert(0) += 1;
            }
            if seen.len() != 2 {
                return Err(Error::LabelCardinality {
                    count: seen.len(),
                    values: seen.keys().cloned().collect(),
                });
            }
            let keys: Vec<&String> = seen.keys().collect();
            order_tokens(keys[0], keys[1])
        }
    };

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut unexpected: Vec<String> = Vec::new();
    for (x, label) in rows {
        let y = if label == neg {
            Label::Minus
        } else if label == pos {
            Label::Plus
        } else if schema.filter_other_labels {
            continue;
        } else {
            if !unexpected.contains(&label) {
                unexpected.push(label);
            }
            continue;
        };
        features.push(x);
        labels.push(y);
    }
    if !unexpected.is_empty() {
        let mut values = vec![neg, pos];
        values.extend(unexpected);
        return Err(Error::LabelCardinality {
            count: values.len(),
            values,
        });
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut data = Dataset::from_rows(features, labels)?;
    if schema.standardize {
        data = Standardizer::fit(&data)?.apply(&data)?;
    }
    Ok(data)
}

/// Per-feature affine map to mean 0, variance 1 (population variance),
/// fitted on one dataset and applicable to another. Constant features are
/// rejected since they cannot be scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &Dataset) -> Result<Self> {
        let n = data.dim();
        let count = data.len() as f64;
        let mut mean = vec![0.0; n];
        for s in data.iter() {
            for (m, v) in mean.iter_mut().zip(s.x()) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= count;
        }
        let mut var = vec![0.0; n];
        for s in data.iter() {
            for ((v, m), x) in var.iter_mut().zip(&mean).zip(s.x()) {
                let d = x - m;
                *v += d * d;
            }
        }
        let mut scale = vec![0.0; n];
        for (j, v) in var.iter().enumerate() {
            let sd = (v / count).sqrt();
            if sd < f64::MIN_POSITIVE.sqrt() {
                return Err(Error::ConstantFeature { column: j });
            }
            scale[j] = sd;
        }
        Ok(Standardizer { mean, scale })
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: data.dim(),
            });
        }
        let samples = data
            .iter()
            .map(|s| {
                let x = s
                    .x()
                    .iter()
                    .zip(&self.mean)
                    .zip(&self.scale)
                    .map(|((x, m), sd)| (x - m) / sd)
                    .collect();
                LabeledSample::new(x, s.y())
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(samples)
    }
}

/// Requested size of the training part of a split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSize {
    /// Train fraction in (0, 1); the train count is the rounded product.
    Fraction(f64),
    /// Absolute train count.
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub size: SplitSize,
    pub seed: u64,
}

/// Splits into (train, test) after a seeded Fisher-Yates shuffle (stream 2).
/// Both parts must be nonempty.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let total = data.len();
    let train_n = match spec.size {
        SplitSize::Fraction(f) => {
            if !(f.is_finite() && 0.0 < f && f < 1.0) {
                return Err(Error::invalid(
                    "train_fraction",
                    format!("must lie strictly between 0 and 1, got {f}"),
                ));
            }
            (f * total as f64).round() as usize
        }
        SplitSize::Count(c) => c,
    };
    if train_n == 0 || train_n >= total {
        return Err(Error::EmptySplit {
            train: train_n,
            test: total.saturating_sub(train_n),
        });
    }

    let mut order: Vec<usize> = (0..total).collect();
    let mut rng = StreamRng::new(spec.seed, STREAM_SPLIT);
    for i in (1..total).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }

    let pick = |ids: &[usize]| -> Result<Dataset> {
        Dataset::new(ids.iter().map(|&i| data.samples()[i].clone()).collect())
    };
    let train = pick(&order[..train_n])?;
    let test = pick(&order[train_n..])?;
    Ok((train, test))
}
