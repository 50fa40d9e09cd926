//! Agreement statistics between attribution methods: Kendall tau-b with tie
//! correction, Pearson correlation, row-wise aggregation over a dataset, and
//! correlation of global importance vectors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::explain::{self, MethodSpec};
use crate::model::NaiveBayesModel;

/// Kendall rank correlation with tie correction:
/// `tau_b = (C - D) / sqrt((n0 - t_a)(n0 - t_b))` where `n0 = n(n-1)/2` and
/// `t_a`, `t_b` count the tied pairs on each side. Errors when either side is
/// fully tied (the denominator vanishes).
pub fn kendall_tau_b(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewObservations(n));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    let mut concordant = 0u64;
    let mut discordant = 0u64;
    let mut ties_a = 0u64;
    let mut ties_b = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 {
                ties_a += 1;
            }
            if db == 0.0 {
                ties_b += 1;
            }
            if da != 0.0 && db != 0.0 {
                if (da > 0.0) == (db > 0.0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }

    let n0 = (n * (n - 1) / 2) as f64;
    let denom_a = n0 - ties_a as f64;
    let denom_b = n0 - ties_b as f64;
    if denom_a == 0.0 {
        return Err(Error::UndefinedCorrelation { side: "first" });
    }
    if denom_b == 0.0 {
        return Err(Error::UndefinedCorrelation { side: "second" });
    }
    let tau = (concordant as f64 - discordant as f64) / (denom_a * denom_b).sqrt();
    Ok(tau.clamp(-1.0, 1.0))
}

/// Product-moment correlation. Errors when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewObservations(n));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let nf = n as f64;
    let mean_a = a.iter().sum::<f64>() / nf;
    let mean_b = b.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - mean_a) * (y - mean_b);
        var_a += (x - mean_a) * (x - mean_a);
        var_b += (y - mean_b) * (y - mean_b);
    }
    if var_a == 0.0 {
        return Err(Error::ZeroVariance { side: "first" });
    }
    if var_b == 0.0 {
        return Err(Error::ZeroVariance { side: "second" });
    }
    Ok((cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0))
}

/// Row-wise Kendall aggregation: mean and population standard deviation of
/// the per-row tau-b between two attribution matrices. Rows where tau is
/// undefined (a fully tied side) are skipped and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct RowwiseAgreement {
    pub mean: f64,
    pub std: f64,
    pub n_rows: usize,
    pub skipped: usize,
}

pub fn rowwise_agreement<R: AsRef<[f64]> + Sync>(a: &[R], b: &[R]) -> Result<RowwiseAgreement> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            detail: format!("{} rows vs {} rows", a.len(), b.len()),
        });
    }
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        if ra.as_ref().len() != rb.as_ref().len() {
            return Err(Error::ShapeMismatch {
                detail: format!("row {i}: {} values vs {}", ra.as_ref().len(), rb.as_ref().len()),
            });
        }
    }

    let taus: Vec<Option<f64>> = a
        .par_iter()
        .zip(b.par_iter())
        .map(|(ra, rb)| match kendall_tau_b(ra.as_ref(), rb.as_ref()) {
            Ok(tau) => Ok(Some(tau)),
            Err(Error::UndefinedCorrelation { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;

    // Aggregate in fixed row order so results do not depend on worker count.
    let mut sum = 0.0;
    let mut count = 0usize;
    for tau in taus.iter().flatten() {
        sum += tau;
        count += 1;
    }
    if count == 0 {
        return Err(Error::AllRowsUndefined);
    }
    let mean = sum / count as f64;
    let mut var = 0.0;
    for tau in taus.iter().flatten() {
        var += (tau - mean) * (tau - mean);
    }
    let std = (var / count as f64).sqrt();
    Ok(RowwiseAgreement {
        mean,
        std,
        n_rows: a.len(),
        skipped: a.len() - count,
    })
}

/// Correlations between the global importance vectors of two methods.
pub fn global_agreement(
    model: &NaiveBayesModel,
    rows: &[Vec<usize>],
    spec_a: &MethodSpec,
    spec_b: &MethodSpec,
) -> Result<(f64, f64)> {
    let ga = explain::global_importance(model, rows, spec_a)?;
    let gb = explain::global_importance(model, rows, spec_b)?;
    Ok((
        pearson(&ga.values, &gb.values)?,
        kendall_tau_b(&ga.values, &gb.values)?,
    ))
}

/// Full agreement report between two attribution methods over one dataset:
/// row-wise Kendall statistics plus correlations between the two global
/// importance vectors. The reported std is the population standard deviation
/// of the per-row tau values.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub method_a: String,
    pub method_b: String,
    pub n_rows: usize,
    pub rowwise_kendall_mean: f64,
    pub rowwise_kendall_std: f64,
    pub rowwise_skipped: usize,
    pub global_pearson: f64,
    pub global_kendall: f64,
}

pub fn agreement_report(
    model: &NaiveBayesModel,
    rows: &[Vec<usize>],
    spec_a: &MethodSpec,
    spec_b: &MethodSpec,
) -> Result<AgreementReport> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let ma = explain::attribute_matrix(model, rows, spec_a)?;
    let mb = explain::attribute_matrix(model, rows, spec_b)?;
    let rowwise = rowwise_agreement(&ma.row_slices(), &mb.row_slices())?;
    let ga = explain::global_from_matrix(&ma);
    let gb = explain::global_from_matrix(&mb);
    Ok(AgreementReport {
        method_a: spec_a.tag().name().to_string(),
        method_b: spec_b.tag().name().to_string(),
        n_rows: rowwise.n_rows,
        rowwise_kendall_mean: rowwise.mean,
        rowwise_kendall_std: rowwise.std,
        rowwise_skipped: rowwise.skipped,
        global_pearson: pearson(&ga.values, &gb.values)?,
        global_kendall: kendall_tau_b(&ga.values, &gb.values)?,
    })
}
