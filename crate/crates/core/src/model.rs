//! The weighted naive Bayes classifier: fitting with pseudo-count smoothing,
//! log-space posterior prediction, the log-odds score, and persistence.
//!
//! The posterior is `P(Y_k | x) ∝ P(Y_k) · Π_i P(X_i = x_i | Y_k)^{w_i}` with
//! per-variable weights `w_i ∈ [0, 1]`. All evaluation happens in log space so
//! that models with many variables and extreme conditionals stay finite.
//! Smoothing guarantees strictly positive stored probabilities, which keeps
//! every logarithm downstream finite.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::ColumnKind;
use crate::error::{Error, Result};
use crate::preprocess::{PartDataset, Preprocessor, VariablePartition};

/// Version tag written into every model file.
pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Tolerance on stored probability tables summing to one.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// How the per-part marginals `P(X_i = p)` are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalMode {
    /// Empirical counts over the training rows (with the same smoothing).
    Empirical,
    /// Prior-weighted mixture of the class conditionals.
    Mixture,
}

/// A fitted weighted naive Bayes model over discretized parts.
///
/// Table layout: `cond[i][k][p] = P(X_i = p | Y_k)` and
/// `marginal[i][p] = P(X_i = p)`, so the model stores exactly
/// `(K + 1) · sum_i P_i` probability cells.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub preprocessor: Preprocessor,
    pub class_labels: Vec<String>,
    pub priors: Vec<f64>,
    pub cond: Vec<Vec<Vec<f64>>>,
    pub marginal: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub smoothing: f64,
    pub marginal_mode: MarginalMode,
}

impl NaiveBayesModel {
    /// Number of feature variables.
    pub fn d(&self) -> usize {
        self.weights.len()
    }

    /// Number of classes.
    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn part_count(&self, variable: usize) -> usize {
        self.preprocessor.partitions[variable].part_count
    }

    pub fn part_counts(&self) -> Vec<usize> {
        self.preprocessor.part_counts()
    }

    pub fn feature_columns(&self) -> Vec<(String, ColumnKind)> {
        self.preprocessor.feature_columns()
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.preprocessor
            .partitions
            .iter()
            .map(|p| p.variable.clone())
            .collect()
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.class_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
                known: self.class_labels.clone(),
            })
    }

    pub fn check_class(&self, index: usize) -> Result<()> {
        if index >= self.n_classes() {
            return Err(Error::ClassIndex {
                index,
                count: self.n_classes(),
            });
        }
        Ok(())
    }

    /// Validate a part-index vector against the model's partitions.
    pub fn check_instance(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.d() {
            return Err(Error::InstanceArity {
                expected: self.d(),
                found: x.len(),
            });
        }
        for (i, (&part, partition)) in x.iter().zip(&self.preprocessor.partitions).enumerate() {
            if part >= partition.part_count {
                return Err(Error::PartIndex {
                    variable: self.preprocessor.partitions[i].variable.clone(),
                    part,
                    count: partition.part_count,
                });
            }
        }
        Ok(())
    }

    /// Posterior class probabilities for a part-index vector, computed in log
    /// space and normalized. Always non-negative and summing to one.
    pub fn predict_proba(&self, x: &[usize]) -> Result<Vec<f64>> {
        self.check_instance(x)?;
        let scores: Vec<f64> = (0..self.n_classes())
            .map(|k| self.log_score(x, k))
            .collect();
        Ok(normalize_log_scores(&scores))
    }

    /// Unnormalized log posterior of class `k`.
    fn log_score(&self, x: &[usize], k: usize) -> f64 {
        let mut score = self.priors[k].ln();
        for (i, &part) in x.iter().enumerate() {
            score += self.weights[i] * self.cond[i][k][part].ln();
        }
        score
    }

    /// Natural-log odds of class `pos` against class `neg`:
    /// `ln(P(pos)/P(neg)) + Σ_i w_i · ln(cond_pos / cond_neg)`.
    ///
    /// Log ratios are evaluated as differences of logarithms, which makes
    /// `log_odds(x, a, b) == -log_odds(x, b, a)` hold exactly.
    pub fn log_odds(&self, x: &[usize], pos: usize, neg: usize) -> Result<f64> {
        self.check_instance(x)?;
        self.check_class(pos)?;
        self.check_class(neg)?;
        if pos == neg {
            return Err(Error::SameClassPair(pos));
        }
        let mut total = self.priors[pos].ln() - self.priors[neg].ln();
        for (i, &part) in x.iter().enumerate() {
            total += self.weights[i] * (self.cond[i][pos][part].ln() - self.cond[i][neg][part].ln());
        }
        Ok(total)
    }

    /// Check every structural and numeric invariant of the model.
    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        let k = self.n_classes();
        if k < 2 {
            return Err(Error::InvalidModel(format!(
                "need at least 2 classes, found {k}"
            )));
        }
        for (i, label) in self.class_labels.iter().enumerate() {
            if self.class_labels[..i].contains(label) {
                return Err(Error::InvalidModel(format!("duplicate class label {label:?}")));
            }
        }
        if self.preprocessor.feature_count() != d {
            return Err(Error::InvalidModel(format!(
                "{} partitions for {} weights",
                self.preprocessor.feature_count(),
                d
            )));
        }
        if self.priors.len() != k {
            return Err(Error::InvalidModel(format!(
                "{} priors for {} classes",
                self.priors.len(),
                k
            )));
        }
        if self.cond.len() != d || self.marginal.len() != d {
            return Err(Error::InvalidModel(
                "conditional/marginal tables do not cover every variable".to_string(),
            ));
        }
        if !(self.smoothing.is_finite() && self.smoothing >= 0.0) {
            return Err(Error::InvalidSmoothing(self.smoothing));
        }
        check_distribution(&self.priors, "priors")?;
        for (i, partition) in self.preprocessor.partitions.iter().enumerate() {
            let parts = partition.part_count;
            if parts == 0 {
                return Err(Error::InvalidModel(format!(
                    "variable {:?} has zero parts",
                    partition.variable
                )));
            }
            if self.cond[i].len() != k {
                return Err(Error::InvalidModel(format!(
                    "variable {:?}: conditional table has {} classes",
                    partition.variable,
                    self.cond[i].len()
                )));
            }
            for (class, row) in self.cond[i].iter().enumerate() {
                if row.len() != parts {
                    return Err(Error::InvalidModel(format!(
                        "variable {:?}, class {class}: {} cells for {parts} parts",
                        partition.variable,
                        row.len()
                    )));
                }
                check_distribution(row, &format!("cond({}, class {class})", partition.variable))?;
            }
            if self.marginal[i].len() != parts {
                return Err(Error::InvalidModel(format!(
                    "variable {:?}: marginal has {} cells for {parts} parts",
                    partition.variable,
                    self.marginal[i].len()
                )));
            }
            check_distribution(&self.marginal[i], &format!("marginal({})", partition.variable))?;
            let w = self.weights[i];
            if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
                return Err(Error::WeightOutOfRange {
                    variable: partition.variable.clone(),
                    value: w,
                });
            }
        }
        Ok(())
    }

    /// Serialize the model to a single JSON document. Probabilities are
    /// written with 17 significant digits so reloading reproduces every f64
    /// bit for bit.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let file = ModelFile {
            version: MODEL_FORMAT_VERSION,
            class_labels: self.class_labels.clone(),
            priors: self.priors.clone(),
            partitions: self.preprocessor.partitions.clone(),
            cond: self.cond.clone(),
            marginal: self.marginal.clone(),
            weights: self.weights.clone(),
            smoothing: self.smoothing,
            marginal_mode: self.marginal_mode,
        };
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecisionFormatter);
        file.serialize(&mut ser).map_err(|e| Error::ModelFormat {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        buf.push(b'\n');
        let mut out = fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        out.write_all(&buf).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(())
    }

    /// Load and validate a model file written by [`NaiveBayesModel::save`].
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::ModelFormat {
                path: path.to_path_buf(),
                detail: e.to_string(),
            })?;
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::ModelFormat {
                path: path.to_path_buf(),
                detail: "missing numeric \"version\" field".to_string(),
            })?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                path: path.to_path_buf(),
                found: version,
                supported: MODEL_FORMAT_VERSION,
            });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::ModelFormat {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        let model = NaiveBayesModel {
            preprocessor: Preprocessor {
                partitions: file.partitions,
            },
            class_labels: file.class_labels,
            priors: file.priors,
            cond: file.cond,
            marginal: file.marginal,
            weights: file.weights,
            smoothing: file.smoothing,
            marginal_mode: file.marginal_mode,
        };
        model.validate()?;
        Ok(model)
    }
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    let mut sum = 0.0;
    for &p in row {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidModel(format!(
                "{what}: probability {p} is not strictly positive"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::InvalidModel(format!(
            "{what}: probabilities sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// exp-normalize a vector of log scores into probabilities.
fn normalize_log_scores(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut probs: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    probs
}

/// Fit a weighted naive Bayes model from part-encoded data.
///
/// With pseudo-count `smoothing = λ`:
/// - `priors[k] = (count_k + λ) / (N + λK)`
/// - `cond[i][k][p] = (count_{i,k,p} + λ) / (count_k + λ·P_i)`
/// - `marginal[i][p] = (count_{i,p} + λ) / (N + λ·P_i)` (empirical mode).
///
/// `weights = None` means uniform weights of 1. `λ = 0` is rejected whenever
/// any count is zero, because the stored tables would contain zeros and every
/// downstream logarithm would diverge.
pub fn fit(
    parts: &PartDataset,
    prep: &Preprocessor,
    weights: Option<&[f64]>,
    smoothing: f64,
    marginal_mode: MarginalMode,
) -> Result<NaiveBayesModel> {
    if parts.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidSmoothing(smoothing));
    }
    let d = prep.feature_count();
    let k = parts.schema.n_classes();
    let n = parts.len();

    let weights: Vec<f64> = match weights {
        None => vec![1.0; d],
        Some(w) => {
            if w.len() != d {
                return Err(Error::WeightCount {
                    expected: d,
                    found: w.len(),
                });
            }
            for (i, &value) in w.iter().enumerate() {
                if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
                    return Err(Error::WeightOutOfRange {
                        variable: prep.partitions[i].variable.clone(),
                        value,
                    });
                }
            }
            w.to_vec()
        }
    };

    let mut class_counts = vec![0usize; k];
    for &label in &parts.labels {
        class_counts[label] += 1;
    }
    let mut cell_counts: Vec<Vec<Vec<usize>>> = prep
        .partitions
        .iter()
        .map(|p| vec![vec![0usize; p.part_count]; k])
        .collect();
    let mut part_totals: Vec<Vec<usize>> = prep
        .partitions
        .iter()
        .map(|p| vec![0usize; p.part_count])
        .collect();
    for (row, &label) in parts.rows.iter().zip(&parts.labels) {
        for (i, &part) in row.iter().enumerate() {
            cell_counts[i][label][part] += 1;
            part_totals[i][part] += 1;
        }
    }

    if smoothing == 0.0 {
        for (class, &count) in class_counts.iter().enumerate() {
            if count == 0 {
                return Err(Error::ZeroCount {
                    detail: format!("class {:?} has no rows", parts.schema.class_labels[class]),
                });
            }
        }
        for (i, partition) in prep.partitions.iter().enumerate() {
            for (class, row) in cell_counts[i].iter().enumerate() {
                if let Some(part) = row.iter().position(|&c| c == 0) {
                    return Err(Error::ZeroCount {
                        detail: format!(
                            "variable {:?}, class {:?}, part {part} was never observed",
                            partition.variable, parts.schema.class_labels[class]
                        ),
                    });
                }
            }
        }
    }

    let priors: Vec<f64> = class_counts
        .iter()
        .map(|&c| (c as f64 + smoothing) / (n as f64 + smoothing * k as f64))
        .collect();

    let mut cond = Vec::with_capacity(d);
    let mut marginal = Vec::with_capacity(d);
    for (i, partition) in prep.partitions.iter().enumerate() {
        let parts_i = partition.part_count as f64;
        let table: Vec<Vec<f64>> = (0..k)
            .map(|class| {
                let denom = class_counts[class] as f64 + smoothing * parts_i;
                cell_counts[i][class]
                    .iter()
                    .map(|&c| (c as f64 + smoothing) / denom)
                    .collect()
            })
            .collect();
        let marg: Vec<f64> = match marginal_mode {
            MarginalMode::Empirical => {
                let denom = n as f64 + smoothing * parts_i;
                part_totals[i]
                    .iter()
                    .map(|&c| (c as f64 + smoothing) / denom)
                    .collect()
            }
            MarginalMode::Mixture => (0..partition.part_count)
                .map(|p| (0..k).map(|class| table[class][p] * priors[class]).sum())
                .collect(),
        };
        cond.push(table);
        marginal.push(marg);
    }

    let model = NaiveBayesModel {
        preprocessor: prep.clone(),
        class_labels: parts.schema.class_labels.clone(),
        priors,
        cond,
        marginal,
        weights,
        smoothing,
        marginal_mode,
    };
    model.validate()?;
    Ok(model)
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u64,
    class_labels: Vec<String>,
    priors: Vec<f64>,
    partitions: Vec<VariablePartition>,
    cond: Vec<Vec<Vec<f64>>>,
    marginal: Vec<Vec<f64>>,
    weights: Vec<f64>,
    smoothing: f64,
    marginal_mode: MarginalMode,
}

/// JSON formatter that writes every f64 with 17 significant digits, enough to
/// reproduce the exact bit pattern on reload.
struct FullPrecisionFormatter;

impl serde_json::ser::Formatter for FullPrecisionFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::PartitionKind;
    use crate::synthetic::toy_model;
    use crate::data::Schema;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn binary_parts(rows: Vec<Vec<usize>>, labels: Vec<usize>, d: usize) -> (PartDataset, Preprocessor) {
        let schema = Schema {
            columns: (0..d)
                .map(|i| (format!("v{i}"), ColumnKind::Numeric))
                .collect(),
            target: "y".to_string(),
            class_labels: vec!["n".to_string(), "p".to_string()],
        };
        let prep = Preprocessor {
            partitions: (0..d)
                .map(|i| VariablePartition {
                    variable: format!("v{i}"),
                    kind: PartitionKind::Intervals { cuts: vec![0.5] },
                    part_count: 2,
                    missing_part: None,
                })
                .collect(),
        };
        (
            PartDataset {
                schema,
                rows,
                labels,
            },
            prep,
        )
    }

    #[test]
    fn balanced_priors_without_smoothing() {
        let (parts, prep) = binary_parts(
            vec![vec![0], vec![1], vec![0], vec![1]],
            vec![1, 1, 0, 0],
            1,
        );
        let model = fit(&parts, &prep, None, 0.0, MarginalMode::Empirical).unwrap();
        assert_eq!(model.priors, vec![0.5, 0.5]);
    }

    #[test]
    fn smoothing_formula_matches_hand_computation() {
        // Class p sees part 0 three times and part 1 once; λ=1, N_p=4, P=2
        // gives (3+1)/(4+2) = 4/6 and (1+1)/(4+2) = 2/6.
        let (parts, prep) = binary_parts(
            vec![vec![0], vec![0], vec![0], vec![1], vec![0], vec![1]],
            vec![1, 1, 1, 1, 0, 0],
            1,
        );
        let model = fit(&parts, &prep, None, 1.0, MarginalMode::Empirical).unwrap();
        assert!(close(model.cond[0][1][0], 4.0 / 6.0, 1e-15));
        assert!(close(model.cond[0][1][1], 2.0 / 6.0, 1e-15));
    }

    #[test]
    fn zero_smoothing_with_unseen_part_is_rejected() {
        // Class p never sees part 1.
        let (parts, prep) = binary_parts(
            vec![vec![0], vec![0], vec![0], vec![1]],
            vec![1, 1, 0, 0],
            1,
        );
        assert!(matches!(
            fit(&parts, &prep, None, 0.0, MarginalMode::Empirical),
            Err(Error::ZeroCount { .. })
        ));
    }

    #[test]
    fn toy_posterior_matches_hand_evaluation() {
        let model = toy_model();
        let probs = model.predict_proba(&[0, 0, 0]).unwrap();
        assert!(close(probs[1], 6.0 / 7.0, 1e-12), "got {}", probs[1]);
        assert!(close(probs.iter().sum::<f64>(), 1.0, 1e-12));
    }

    #[test]
    fn zero_weights_reduce_to_priors() {
        let mut model = toy_model();
        model.weights = vec![0.0; 3];
        for x in [[0, 0, 0], [1, 1, 1], [0, 1, 0]] {
            let probs = model.predict_proba(&x).unwrap();
            for (p, prior) in probs.iter().zip(&model.priors) {
                assert!(close(*p, *prior, 1e-12));
            }
        }
    }

    #[test]
    fn identical_conditionals_reduce_to_priors() {
        let mut model = toy_model();
        for i in 0..3 {
            model.cond[i][1] = model.cond[i][0].clone();
        }
        model.priors = vec![0.25, 0.75];
        let probs = model.predict_proba(&[0, 1, 0]).unwrap();
        assert!(close(probs[0], 0.25, 1e-12));
        assert!(close(probs[1], 0.75, 1e-12));
    }

    #[test]
    fn toy_log_odds_and_consistency_with_posterior() {
        let model = toy_model();
        let lo = model.log_odds(&[0, 0, 0], 1, 0).unwrap();
        assert!(close(lo, 6f64.ln(), 1e-12), "got {lo}");
        // Antisymmetry holds exactly thanks to the log-difference form.
        assert_eq!(lo, -model.log_odds(&[0, 0, 0], 0, 1).unwrap());
        // exp(log_odds) equals the posterior ratio.
        let probs = model.predict_proba(&[0, 0, 0]).unwrap();
        assert!(close(lo.exp(), probs[1] / probs[0], 1e-10));
    }

    #[test]
    fn no_underflow_with_many_extreme_variables() {
        let d = 60;
        let prep = Preprocessor {
            partitions: (0..d)
                .map(|i| VariablePartition {
                    variable: format!("v{i}"),
                    kind: PartitionKind::Intervals { cuts: vec![0.5] },
                    part_count: 2,
                    missing_part: None,
                })
                .collect(),
        };
        let extreme = 1e-6;
        let model = NaiveBayesModel {
            preprocessor: prep,
            class_labels: vec!["a".to_string(), "b".to_string()],
            priors: vec![0.5, 0.5],
            cond: (0..d)
                .map(|_| vec![vec![extreme, 1.0 - extreme], vec![1.0 - extreme, extreme]])
                .collect(),
            marginal: (0..d).map(|_| vec![0.5, 0.5]).collect(),
            weights: vec![1.0; d],
            smoothing: 0.5,
            marginal_mode: MarginalMode::Empirical,
        };
        model.validate().unwrap();
        let probs = model.predict_proba(&vec![0usize; d]).unwrap();
        assert!(probs.iter().all(|p| p.is_finite()));
        assert!(close(probs.iter().sum::<f64>(), 1.0, 1e-12));
        assert!(probs[1] > 0.999999);
    }

    #[test]
    fn save_load_round_trips_bit_for_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = toy_model();
        model.save(&path).unwrap();
        let loaded = NaiveBayesModel::load(&path).unwrap();
        assert_eq!(model, loaded);

        // 17 significant digits are written out.
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("e-1"), "floats use scientific notation");
        let mantissa_len = text
            .split("e-1")
            .next()
            .and_then(|s| s.rsplit(':').next())
            .map(|s| s.trim_start_matches(['[', '"', ',']).len());
        assert!(mantissa_len.is_some());
    }

    #[test]
    fn tampered_and_versioned_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = toy_model();
        model.save(&path).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        // Break the priors so they no longer sum to one.
        let bad = text.replace("\"priors\":[5.0000000000000000e-1", "\"priors\":[9.0000000000000000e-1");
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(
            NaiveBayesModel::load(&path),
            Err(Error::InvalidModel(_))
        ));

        let versioned = text.replace("\"version\":1", "\"version\":99");
        std::fs::write(&path, &versioned).unwrap();
        assert!(matches!(
            NaiveBayesModel::load(&path),
            Err(Error::ModelVersion { found: 99, .. })
        ));

        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(
            NaiveBayesModel::load(&path),
            Err(Error::ModelFormat { .. })
        ));
    }

    #[test]
    fn mixture_marginals_are_prior_weighted() {
        let (parts, prep) = binary_parts(
            vec![vec![0], vec![1], vec![0], vec![0]],
            vec![1, 1, 0, 0],
            1,
        );
        let model = fit(&parts, &prep, None, 0.5, MarginalMode::Mixture).unwrap();
        for p in 0..2 {
            let expect: f64 = (0..2).map(|k| model.cond[0][k][p] * model.priors[k]).sum();
            assert!(close(model.marginal[0][p], expect, 1e-15));
        }
    }

    #[test]
    fn weight_validation() {
        let (parts, prep) = binary_parts(vec![vec![0], vec![1]], vec![1, 0], 1);
        assert!(matches!(
            fit(&parts, &prep, Some(&[1.5]), 0.5, MarginalMode::Empirical),
            Err(Error::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            fit(&parts, &prep, Some(&[0.5, 0.5]), 0.5, MarginalMode::Empirical),
            Err(Error::WeightCount { .. })
        ));
    }
}
