//! CSV loading, schema inference, and the typed dataset the rest of the
//! pipeline consumes.
//!
//! A dataset is a header-first, comma-separated, UTF-8 file. Cells that match
//! one of the configured missing markers (`""` and `"?"` by default) are kept
//! as missing values rather than rejected. The target column is always treated
//! as categorical; a missing target cell is an error. Row order is preserved
//! end to end so per-row attributions stay addressable by index.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kind of a feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// One cell of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Category(String),
    Missing,
}

/// A single row of feature values, one slot per feature column of the schema.
pub type Instance = Vec<Value>;

/// CSV parsing options. Cells equal to any marker (after trimming) are missing.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub missing_markers: Vec<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            missing_markers: vec![String::new(), "?".to_string()],
        }
    }
}

impl CsvOptions {
    /// Parse a comma-separated marker list, e.g. `"?,NA,"` (a trailing comma
    /// adds the empty string).
    pub fn from_marker_list(list: &str) -> Self {
        Self {
            missing_markers: list.split(',').map(str::to_string).collect(),
        }
    }

    fn is_missing(&self, cell: &str) -> bool {
        self.missing_markers.iter().any(|m| m == cell)
    }
}

/// Column layout of a dataset: feature columns in file order, the target
/// column name, and the class labels in first-appearance order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<(String, ColumnKind)>,
    pub target: String,
    pub class_labels: Vec<String>,
}

impl Schema {
    pub fn feature_count(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.class_labels.iter().position(|l| l == label)
    }

    /// Restrict the feature columns to `keep`, preserving file order.
    /// Errors if a requested name is not a feature column.
    pub fn retain_columns(&mut self, keep: &[String]) -> Result<()> {
        for name in keep {
            if self.column_index(name).is_none() {
                return Err(Error::UnknownColumn { name: name.clone() });
            }
        }
        self.columns.retain(|(n, _)| keep.iter().any(|k| k == n));
        Ok(())
    }
}

/// A fully loaded dataset: schema, feature rows, and per-row class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: Schema,
    pub rows: Vec<Instance>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn read_headers(reader: &mut csv::Reader<File>, path: &Path) -> Result<Vec<String>> {
    let headers = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let mut seen = HashSet::new();
    for name in &names {
        if name.is_empty() {
            return Err(Error::EmptyColumnName);
        }
        if !seen.insert(name.clone()) {
            return Err(Error::DuplicateColumn { name: name.clone() });
        }
    }
    Ok(names)
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Infer a schema from a CSV file: a column is numeric iff every non-missing
/// value parses as a finite decimal number, otherwise categorical. Class
/// labels are the distinct target values in first-appearance order. The
/// target itself is always categorical.
pub fn infer_schema(path: &Path, target: &str, opts: &CsvOptions) -> Result<Schema> {
    let mut reader = open_reader(path)?;
    let headers = read_headers(&mut reader, path)?;
    let target_idx = headers
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::UnknownColumn {
            name: target.to_string(),
        })?;

    let mut numeric = vec![true; headers.len()];
    let mut labels: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = record_line(&record);
        if record.len() != headers.len() {
            return Err(Error::RowArity {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        for (idx, cell) in record.iter().enumerate() {
            if idx == target_idx {
                if opts.is_missing(cell) {
                    return Err(Error::MissingClassLabel { line });
                }
                if !labels.iter().any(|l| l == cell) {
                    labels.push(cell.to_string());
                }
            } else if numeric[idx] && !opts.is_missing(cell) && parse_finite(cell).is_none() {
                numeric[idx] = false;
            }
        }
    }

    if labels.len() < 2 {
        return Err(Error::DegenerateTarget {
            target: target.to_string(),
            distinct: labels.len(),
        });
    }

    let columns = headers
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != target_idx)
        .map(|(idx, name)| {
            let kind = if numeric[idx] {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            };
            (name.clone(), kind)
        })
        .collect();

    Ok(Schema {
        columns,
        target: target.to_string(),
        class_labels: labels,
    })
}

fn parse_cell(cell: &str, kind: ColumnKind, column: &str, line: u64, opts: &CsvOptions) -> Result<Value> {
    if opts.is_missing(cell) {
        return Ok(Value::Missing);
    }
    match kind {
        ColumnKind::Numeric => parse_finite(cell)
            .map(Value::Number)
            .ok_or_else(|| Error::NumericParse {
                line,
                column: column.to_string(),
                value: cell.to_string(),
            }),
        ColumnKind::Categorical => Ok(Value::Category(cell.to_string())),
    }
}

/// Map each wanted column name to its index in the file header.
fn header_positions(headers: &[String], wanted: &[&str]) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownColumn {
                    name: name.to_string(),
                })
        })
        .collect()
}

/// Load a CSV file against a known schema. Columns are matched by name, so
/// the file may carry extra columns or a different column order.
pub fn load_csv(path: &Path, schema: &Schema, opts: &CsvOptions) -> Result<Dataset> {
    let mut reader = open_reader(path)?;
    let headers = read_headers(&mut reader, path)?;
    let feature_names: Vec<&str> = schema.columns.iter().map(|(n, _)| n.as_str()).collect();
    let feature_pos = header_positions(&headers, &feature_names)?;
    let target_pos = headers
        .iter()
        .position(|h| h == &schema.target)
        .ok_or_else(|| Error::UnknownColumn {
            name: schema.target.clone(),
        })?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = record_line(&record);
        if record.len() != headers.len() {
            return Err(Error::RowArity {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(schema.columns.len());
        for (slot, &pos) in feature_pos.iter().enumerate() {
            let (name, kind) = &schema.columns[slot];
            row.push(parse_cell(&record[pos], *kind, name, line, opts)?);
        }
        let label_cell = &record[target_pos];
        if opts.is_missing(label_cell) {
            return Err(Error::MissingClassLabel { line });
        }
        let label = schema
            .label_index(label_cell)
            .ok_or_else(|| Error::UnknownClassLabel {
                line,
                label: label_cell.to_string(),
            })?;
        rows.push(row);
        labels.push(label);
    }

    Ok(Dataset {
        schema: schema.clone(),
        rows,
        labels,
    })
}

/// Load only feature columns (by name) from a CSV file; no target required.
/// Used when explaining or scoring data that may not carry labels.
pub fn load_features_csv(
    path: &Path,
    columns: &[(String, ColumnKind)],
    opts: &CsvOptions,
) -> Result<Vec<Instance>> {
    let mut reader = open_reader(path)?;
    let headers = read_headers(&mut reader, path)?;
    let names: Vec<&str> = columns.iter().map(|(n, _)| n.as_str()).collect();
    let positions = header_positions(&headers, &names)?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let line = record_line(&record);
        if record.len() != headers.len() {
            return Err(Error::RowArity {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(columns.len());
        for (slot, &pos) in positions.iter().enumerate() {
            let (name, kind) = &columns[slot];
            row.push(parse_cell(&record[pos], *kind, name, line, opts)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Write a dataset back to CSV (feature columns in schema order, target
/// last). Missing values are written as the empty string.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    let mut header: Vec<&str> = dataset
        .schema
        .columns
        .iter()
        .map(|(n, _)| n.as_str())
        .collect();
    header.push(&dataset.schema.target);
    writer.write_record(&header).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    for (row, &label) in dataset.rows.iter().zip(&dataset.labels) {
        let mut record: Vec<String> = Vec::with_capacity(row.len() + 1);
        for value in row {
            record.push(match value {
                Value::Number(v) => format!("{v}"),
                Value::Category(s) => s.clone(),
                Value::Missing => String::new(),
            });
        }
        record.push(dataset.schema.class_labels[label].clone());
        writer.write_record(&record).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}
