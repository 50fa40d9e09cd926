//! Discretization of features into a small number of parts: equal-frequency
//! intervals for numeric variables and frequency-ranked value groups for
//! categorical variables. Probabilities downstream are estimated per part, so
//! the total part count `sum_i P_i` bounds the table size per class.
//!
//! Conventions:
//! - interval cut points are right-open boundaries: a value equal to a cut
//!   falls in the part to the right;
//! - the `max_groups - 1` most frequent categories become singleton groups and
//!   the remainder is pooled into a fallback group; unseen categories at
//!   encode time map to the fallback when it exists and are an error otherwise;
//! - a column that contains missing values gets a dedicated missing part.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, Dataset, Schema, Value};
use crate::error::{Error, Result};

/// How one variable is split into parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PartitionKind {
    /// Numeric variable: strictly ascending cut points; `cuts.len() + 1`
    /// interval parts indexed left to right.
    Intervals { cuts: Vec<f64> },
    /// Categorical variable: category -> part index, plus an optional
    /// fallback part for pooled and unseen categories.
    Groups {
        groups: BTreeMap<String, usize>,
        fallback: Option<usize>,
    },
}

/// Partition of a single variable, including the optional missing part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariablePartition {
    pub variable: String,
    pub kind: PartitionKind,
    pub part_count: usize,
    pub missing_part: Option<usize>,
}

impl VariablePartition {
    pub fn column_kind(&self) -> ColumnKind {
        match self.kind {
            PartitionKind::Intervals { .. } => ColumnKind::Numeric,
            PartitionKind::Groups { .. } => ColumnKind::Categorical,
        }
    }
}

/// One partition per feature column, in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub partitions: Vec<VariablePartition>,
}

impl Preprocessor {
    pub fn feature_count(&self) -> usize {
        self.partitions.len()
    }

    pub fn part_counts(&self) -> Vec<usize> {
        self.partitions.iter().map(|p| p.part_count).collect()
    }

    /// Feature columns implied by the partitions, usable for loading
    /// unlabeled data against a trained model.
    pub fn feature_columns(&self) -> Vec<(String, ColumnKind)> {
        self.partitions
            .iter()
            .map(|p| (p.variable.clone(), p.column_kind()))
            .collect()
    }
}

/// A dataset reduced to part indices: one index per feature per row, plus the
/// class index per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PartDataset {
    pub schema: Schema,
    pub rows: Vec<Vec<usize>>,
    pub labels: Vec<usize>,
}

impl PartDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Equal-frequency cut candidates over sorted values; duplicate candidates
/// merge so no part is empty. Cuts are midpoints between the neighboring
/// distinct values at each quantile boundary.
fn equal_frequency_cuts(sorted: &[f64], max_bins: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut cuts = Vec::new();
    if n < 2 || max_bins < 2 {
        return cuts;
    }
    for k in 1..max_bins {
        let idx = k * n / max_bins;
        if idx == 0 || idx >= n {
            continue;
        }
        let lo = sorted[idx - 1];
        let hi = sorted[idx];
        if lo < hi {
            let mut cut = lo + (hi - lo) / 2.0;
            if cut <= lo {
                cut = hi;
            }
            if cuts.last().is_none_or(|&last| cut > last) {
                cuts.push(cut);
            }
        }
    }
    cuts
}

fn fit_numeric(dataset: &Dataset, col: usize, max_bins: usize) -> (Vec<f64>, bool) {
    let mut values: Vec<f64> = Vec::new();
    let mut has_missing = false;
    for row in &dataset.rows {
        match &row[col] {
            Value::Number(v) => values.push(*v),
            Value::Missing => has_missing = true,
            Value::Category(_) => {}
        }
    }
    values.sort_by(|a, b| a.total_cmp(b));
    (equal_frequency_cuts(&values, max_bins), has_missing)
}

fn fit_categorical(
    dataset: &Dataset,
    col: usize,
    max_groups: usize,
) -> (BTreeMap<String, usize>, Option<usize>, usize, bool) {
    // Count frequencies, remembering first-appearance order for tie breaks.
    let mut order: Vec<String> = Vec::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut has_missing = false;
    for row in &dataset.rows {
        match &row[col] {
            Value::Category(s) => {
                if !counts.contains_key(s) {
                    order.push(s.clone());
                }
                *counts.entry(s.clone()).or_insert(0) += 1;
            }
            Value::Missing => has_missing = true,
            Value::Number(_) => {}
        }
    }
    let mut ranked: Vec<(usize, String)> = order.into_iter().enumerate().collect();
    ranked.sort_by(|(seen_a, cat_a), (seen_b, cat_b)| {
        counts[cat_b].cmp(&counts[cat_a]).then(seen_a.cmp(seen_b))
    });

    let distinct = ranked.len();
    let singletons = distinct.min(max_groups.saturating_sub(1));
    let pooled = distinct - singletons;

    let mut groups = BTreeMap::new();
    for (rank, (_, cat)) in ranked.into_iter().enumerate() {
        let part = if rank < singletons { rank } else { singletons };
        groups.insert(cat, part);
    }
    let fallback = (pooled > 0).then_some(singletons);
    let base_parts = singletons + usize::from(pooled > 0);
    (groups, fallback, base_parts.max(1), has_missing)
}

/// Fit one partition per feature column. Numeric columns get at most
/// `max_bins` interval parts; categorical columns at most `max_groups` group
/// parts. Columns with missing values get one extra missing part.
pub fn fit_partitions(dataset: &Dataset, max_bins: usize, max_groups: usize) -> Result<Preprocessor> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if max_bins == 0 {
        return Err(Error::InvalidParameter {
            name: "max_bins",
            value: max_bins,
        });
    }
    if max_groups == 0 {
        return Err(Error::InvalidParameter {
            name: "max_groups",
            value: max_groups,
        });
    }

    let mut partitions = Vec::with_capacity(dataset.schema.feature_count());
    for (col, (name, kind)) in dataset.schema.columns.iter().enumerate() {
        let partition = match kind {
            ColumnKind::Numeric => {
                let (cuts, has_missing) = fit_numeric(dataset, col, max_bins);
                let base = cuts.len() + 1;
                VariablePartition {
                    variable: name.clone(),
                    kind: PartitionKind::Intervals { cuts },
                    part_count: base + usize::from(has_missing),
                    missing_part: has_missing.then_some(base),
                }
            }
            ColumnKind::Categorical => {
                let (groups, fallback, base, has_missing) =
                    fit_categorical(dataset, col, max_groups);
                VariablePartition {
                    variable: name.clone(),
                    kind: PartitionKind::Groups { groups, fallback },
                    part_count: base + usize::from(has_missing),
                    missing_part: has_missing.then_some(base),
                }
            }
        };
        partitions.push(partition);
    }
    Ok(Preprocessor { partitions })
}

fn encode_value(partition: &VariablePartition, value: &Value) -> Result<usize> {
    match value {
        Value::Missing => partition
            .missing_part
            .ok_or_else(|| Error::MissingValueWithoutPart {
                column: partition.variable.clone(),
            }),
        Value::Number(v) => match &partition.kind {
            // Right-open intervals: part index = number of cuts <= v.
            PartitionKind::Intervals { cuts } => Ok(cuts.partition_point(|c| *c <= *v)),
            PartitionKind::Groups { .. } => Err(Error::ValueKindMismatch {
                column: partition.variable.clone(),
            }),
        },
        Value::Category(s) => match &partition.kind {
            PartitionKind::Groups { groups, fallback } => {
                if let Some(&part) = groups.get(s) {
                    Ok(part)
                } else if let Some(part) = fallback {
                    Ok(*part)
                } else {
                    Err(Error::UnseenCategory {
                        column: partition.variable.clone(),
                        value: s.clone(),
                    })
                }
            }
            PartitionKind::Intervals { .. } => Err(Error::ValueKindMismatch {
                column: partition.variable.clone(),
            }),
        },
    }
}

/// Encode one instance into part indices.
pub fn encode_instance(prep: &Preprocessor, instance: &[Value]) -> Result<Vec<usize>> {
    if instance.len() != prep.feature_count() {
        return Err(Error::InstanceArity {
            expected: prep.feature_count(),
            found: instance.len(),
        });
    }
    prep.partitions
        .iter()
        .zip(instance)
        .map(|(partition, value)| encode_value(partition, value))
        .collect()
}

/// Encode a whole dataset into part indices, preserving row order.
pub fn encode(prep: &Preprocessor, dataset: &Dataset) -> Result<PartDataset> {
    let rows = dataset
        .rows
        .iter()
        .map(|row| encode_instance(prep, row))
        .collect::<Result<Vec<_>>>()?;
    Ok(PartDataset {
        schema: dataset.schema.clone(),
        rows,
        labels: dataset.labels.clone(),
    })
}
