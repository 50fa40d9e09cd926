//! Per-instance attributions for the weighted naive Bayes model.
//!
//! For a class pair (pos, neg) the contribution of variable `m` at instance
//! `x` has a closed form:
//!
//! ```text
//! phi_m(x) = w_m * ( ln(P(x_m | pos) / P(x_m | neg))
//!                    - Σ_p P(X_m = p) · ln(P(p | pos) / P(p | neg)) )
//! ```
//!
//! i.e. the instance's log likelihood ratio contrasted with its expectation
//! under the stored marginal. This is the exact Shapley value of the log-odds
//! coalition game (see the `oracle` module for the exhaustive cross-check),
//! computable in `O(Σ_i P_i)` per model plus `O(d)` per instance once the
//! expectation terms are cached.
//!
//! The Weight of Evidence drops the expectation term: `woe_m = w_m · ln(ratio)`.
//! The two differ by a per-variable constant, so they rank instances of one
//! variable identically but can rank variables differently.
//!
//! Log ratios are always computed as differences of logarithms so that
//! swapping the class pair negates every attribution exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NaiveBayesModel;
use crate::oracle::{self, SamplingConfig};

/// Attribution method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Shapley,
    Woe,
    ShapleyMulticlass,
    Bruteforce,
    Sampling,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Shapley => "shapley",
            Method::Woe => "woe",
            Method::ShapleyMulticlass => "multiclass",
            Method::Bruteforce => "bruteforce",
            Method::Sampling => "sampling",
        }
    }
}

/// The negative side of a class pair: a concrete class, or the pool of all
/// remaining classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegClass {
    Class(usize),
    Rest,
}

/// Per-instance, per-variable signed contributions with their orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    pub method: Method,
    /// Positive class index; `None` for the combined multiclass score.
    pub pos_class: Option<usize>,
    pub neg_class: NegClass,
    pub values: Vec<f64>,
    pub instance_index: Option<usize>,
}

/// Mean absolute contribution per variable over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalImportance {
    pub method: Method,
    pub values: Vec<f64>,
}

/// Attributions for a whole dataset in one contiguous row-major allocation.
/// This is the batch engine behind the dataset-level commands: one value per
/// (row, variable), written in parallel, deterministic in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionMatrix {
    pub method: Method,
    pub pos_class: Option<usize>,
    pub neg_class: NegClass,
    pub d: usize,
    pub values: Vec<f64>,
}

impl AttributionMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.len().checked_div(self.d).unwrap_or(0)
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.values[index * self.d..(index + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d.max(1))
    }

    pub fn row_slices(&self) -> Vec<&[f64]> {
        self.rows().collect()
    }
}

/// Precomputed per-class-pair tables: unweighted log likelihood ratios per
/// part and their expectations under the stored marginals. Building one costs
/// `O(Σ_i P_i)`; every attribution afterwards costs `O(d)`.
#[derive(Debug, Clone)]
pub struct PairCache {
    pos: usize,
    neg: NegClass,
    prior_log_ratio: f64,
    weights: Vec<f64>,
    part_counts: Vec<usize>,
    /// `log_ratio[m][p] = ln P(p | pos) - ln P(p | neg)`.
    log_ratio: Vec<Vec<f64>>,
    /// `expectation[m] = Σ_p marginal[m][p] · log_ratio[m][p]`.
    expectation: Vec<f64>,
}

impl PairCache {
    /// Cache for a concrete (pos, neg) class pair.
    pub fn new(model: &NaiveBayesModel, pos: usize, neg: usize) -> Result<Self> {
        model.check_class(pos)?;
        model.check_class(neg)?;
        if pos == neg {
            return Err(Error::SameClassPair(pos));
        }
        let ln_neg = |m: usize, p: usize| model.cond[m][neg][p].ln();
        Ok(Self::build(
            model,
            pos,
            NegClass::Class(neg),
            model.priors[neg].ln(),
            ln_neg,
        ))
    }

    /// Cache for `pos` against the pool of all other classes. The pooled
    /// conditional is the prior-weighted mixture of the remaining classes'
    /// conditionals, which is what the full model reduces to when those
    /// classes are merged. With two classes this is exactly the other class.
    pub fn one_vs_rest(model: &NaiveBayesModel, pos: usize) -> Result<Self> {
        model.check_class(pos)?;
        let k = model.n_classes();
        if k == 2 {
            let neg = 1 - pos;
            let ln_neg = |m: usize, p: usize| model.cond[m][neg][p].ln();
            return Ok(Self::build(
                model,
                pos,
                NegClass::Rest,
                model.priors[neg].ln(),
                ln_neg,
            ));
        }
        let rest_prior: f64 = (0..k).filter(|&j| j != pos).map(|j| model.priors[j]).sum();
        let ln_neg = |m: usize, p: usize| {
            let pooled: f64 = (0..k)
                .filter(|&j| j != pos)
                .map(|j| model.cond[m][j][p] * model.priors[j])
                .sum::<f64>()
                / rest_prior;
            pooled.ln()
        };
        Ok(Self::build(
            model,
            pos,
            NegClass::Rest,
            rest_prior.ln(),
            ln_neg,
        ))
    }

    /// Dispatch on the negative side.
    pub fn for_pair(model: &NaiveBayesModel, pos: usize, neg: NegClass) -> Result<Self> {
        match neg {
            NegClass::Class(neg) => Self::new(model, pos, neg),
            NegClass::Rest => Self::one_vs_rest(model, pos),
        }
    }

    fn build(
        model: &NaiveBayesModel,
        pos: usize,
        neg: NegClass,
        ln_neg_prior: f64,
        ln_neg_cond: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let d = model.d();
        let mut log_ratio = Vec::with_capacity(d);
        let mut expectation = Vec::with_capacity(d);
        for m in 0..d {
            let parts = model.part_count(m);
            let ratios: Vec<f64> = (0..parts)
                .map(|p| model.cond[m][pos][p].ln() - ln_neg_cond(m, p))
                .collect();
            let expect: f64 = ratios
                .iter()
                .zip(&model.marginal[m])
                .map(|(&r, &w)| w * r)
                .sum();
            log_ratio.push(ratios);
            expectation.push(expect);
        }
        Self {
            pos,
            neg,
            prior_log_ratio: model.priors[pos].ln() - ln_neg_prior,
            weights: model.weights.clone(),
            part_counts: model.part_counts(),
            log_ratio,
            expectation,
        }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn neg(&self) -> NegClass {
        self.neg
    }

    pub fn d(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, m: usize) -> f64 {
        self.weights[m]
    }

    pub fn prior_log_ratio(&self) -> f64 {
        self.prior_log_ratio
    }

    /// Unweighted instance log ratio of variable `m` at part `p`.
    pub fn instance_term(&self, m: usize, part: usize) -> f64 {
        self.log_ratio[m][part]
    }

    /// Expectation of variable `m`'s log ratio under the stored marginal.
    pub fn expectation(&self, m: usize) -> f64 {
        self.expectation[m]
    }

    pub fn check_instance(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.d() {
            return Err(Error::InstanceArity {
                expected: self.d(),
                found: x.len(),
            });
        }
        for (m, (&part, &count)) in x.iter().zip(&self.part_counts).enumerate() {
            if part >= count {
                return Err(Error::PartIndex {
                    variable: format!("#{m}"),
                    part,
                    count,
                });
            }
        }
        Ok(())
    }

    /// Shapley value of every variable at `x`.
    pub fn shapley(&self, x: &[usize]) -> Result<Vec<f64>> {
        self.check_instance(x)?;
        Ok(self.shapley_unchecked(x))
    }

    /// Weight of Evidence of every variable at `x`.
    pub fn woe(&self, x: &[usize]) -> Result<Vec<f64>> {
        self.check_instance(x)?;
        Ok(self.woe_unchecked(x))
    }

    pub(crate) fn shapley_unchecked(&self, x: &[usize]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(m, &part)| self.weights[m] * (self.log_ratio[m][part] - self.expectation[m]))
            .collect()
    }

    pub(crate) fn woe_unchecked(&self, x: &[usize]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(m, &part)| self.weights[m] * self.log_ratio[m][part])
            .collect()
    }

    fn shapley_into(&self, x: &[usize], out: &mut [f64]) {
        for (m, (&part, slot)) in x.iter().zip(out).enumerate() {
            *slot = self.weights[m] * (self.log_ratio[m][part] - self.expectation[m]);
        }
    }

    fn woe_into(&self, x: &[usize], out: &mut [f64]) {
        for (m, (&part, slot)) in x.iter().zip(out).enumerate() {
            *slot = self.weights[m] * self.log_ratio[m][part];
        }
    }

    /// The constant gap between the instance log odds and the sum of Shapley
    /// values: prior log ratio plus the weighted expectation terms.
    pub fn efficiency_constant(&self) -> f64 {
        let mut total = self.prior_log_ratio;
        for (w, e) in self.weights.iter().zip(&self.expectation) {
            total += w * e;
        }
        total
    }

    /// Log odds of `x` under this pair's orientation (instance terms only).
    pub fn log_odds(&self, x: &[usize]) -> Result<f64> {
        self.check_instance(x)?;
        let mut total = self.prior_log_ratio;
        for (m, &part) in x.iter().enumerate() {
            total += self.weights[m] * self.log_ratio[m][part];
        }
        Ok(total)
    }
}

/// Expectation of variable `m`'s log likelihood ratio under the stored
/// marginal: `Σ_p P(X_m = p) · ln(P(p | pos) / P(p | neg))`.
pub fn expectation_term(model: &NaiveBayesModel, m: usize, pos: usize, neg: usize) -> Result<f64> {
    if m >= model.d() {
        return Err(Error::VariableIndex {
            index: m,
            count: model.d(),
        });
    }
    Ok(PairCache::new(model, pos, neg)?.expectation(m))
}

/// Exact Shapley attribution of every variable at `x` for the (pos, neg)
/// orientation.
pub fn shapley_analytic(
    model: &NaiveBayesModel,
    x: &[usize],
    pos: usize,
    neg: usize,
) -> Result<Attribution> {
    let cache = PairCache::new(model, pos, neg)?;
    Ok(Attribution {
        method: Method::Shapley,
        pos_class: Some(pos),
        neg_class: NegClass::Class(neg),
        values: cache.shapley(x)?,
        instance_index: None,
    })
}

/// Weight of Evidence of every variable at `x`.
pub fn woe(model: &NaiveBayesModel, x: &[usize], pos: usize, neg: usize) -> Result<Attribution> {
    let cache = PairCache::new(model, pos, neg)?;
    Ok(Attribution {
        method: Method::Woe,
        pos_class: Some(pos),
        neg_class: NegClass::Class(neg),
        values: cache.woe(x)?,
        instance_index: None,
    })
}

/// The instance-independent constant `log_odds(x) - Σ_m phi_m(x)`.
pub fn efficiency_constant(model: &NaiveBayesModel, pos: usize, neg: usize) -> Result<f64> {
    Ok(PairCache::new(model, pos, neg)?.efficiency_constant())
}

/// Signed one-vs-rest Shapley attribution for class `pos` against the pooled
/// remaining classes.
pub fn shapley_one_vs_rest(model: &NaiveBayesModel, x: &[usize], pos: usize) -> Result<Attribution> {
    let cache = PairCache::one_vs_rest(model, pos)?;
    Ok(Attribution {
        method: Method::Shapley,
        pos_class: Some(pos),
        neg_class: NegClass::Rest,
        values: cache.shapley(x)?,
        instance_index: None,
    })
}

/// Multiclass impact score: for each variable, the sum over classes of the
/// absolute one-vs-rest Shapley values. Always non-negative; with two classes
/// it reduces to `2·|phi_m|`.
pub fn shapley_multiclass(model: &NaiveBayesModel, x: &[usize]) -> Result<Attribution> {
    let mut totals = vec![0.0; model.d()];
    for pos in 0..model.n_classes() {
        let cache = PairCache::one_vs_rest(model, pos)?;
        for (total, phi) in totals.iter_mut().zip(cache.shapley(x)?) {
            *total += phi.abs();
        }
    }
    Ok(Attribution {
        method: Method::ShapleyMulticlass,
        pos_class: None,
        neg_class: NegClass::Rest,
        values: totals,
        instance_index: None,
    })
}

/// Divide an attribution by the sum of its values, yielding shares that sum
/// to one. Errors when the sum is exactly zero.
pub fn normalize(attr: &Attribution) -> Result<Vec<f64>> {
    let sum: f64 = attr.values.iter().sum();
    if sum == 0.0 {
        return Err(Error::ZeroSumAttribution);
    }
    Ok(attr.values.iter().map(|v| v / sum).collect())
}

/// A fully resolved attribution request, ready to run over a dataset.
#[derive(Debug, Clone)]
pub enum MethodSpec {
    Shapley { pos: usize, neg: NegClass },
    Woe { pos: usize, neg: NegClass },
    Multiclass,
    Bruteforce { pos: usize, neg: NegClass },
    Sampling { pos: usize, neg: NegClass, cfg: SamplingConfig },
}

impl MethodSpec {
    pub fn tag(&self) -> Method {
        match self {
            MethodSpec::Shapley { .. } => Method::Shapley,
            MethodSpec::Woe { .. } => Method::Woe,
            MethodSpec::Multiclass => Method::ShapleyMulticlass,
            MethodSpec::Bruteforce { .. } => Method::Bruteforce,
            MethodSpec::Sampling { .. } => Method::Sampling,
        }
    }
}

/// Attribute every row of a part-encoded dataset. Rows are processed in
/// parallel and returned in input order, so results are deterministic
/// regardless of worker count.
///
/// Rows are validated up front; the per-row fan-out then runs branch-free so
/// the per-instance cost stays at O(d).
pub fn explain_dataset(
    model: &NaiveBayesModel,
    rows: &[Vec<usize>],
    spec: &MethodSpec,
) -> Result<Vec<Attribution>> {
    for x in rows {
        model.check_instance(x)?;
    }
    let attrs = match spec {
        MethodSpec::Shapley { pos, neg } => {
            let cache = PairCache::for_pair(model, *pos, *neg)?;
            rows.par_iter()
                .enumerate()
                .map(|(index, x)| Attribution {
                    method: Method::Shapley,
                    pos_class: Some(*pos),
                    neg_class: *neg,
                    values: cache.shapley_unchecked(x),
                    instance_index: Some(index),
                })
                .collect()
        }
        MethodSpec::Woe { pos, neg } => {
            let cache = PairCache::for_pair(model, *pos, *neg)?;
            rows.par_iter()
                .enumerate()
                .map(|(index, x)| Attribution {
                    method: Method::Woe,
                    pos_class: Some(*pos),
                    neg_class: *neg,
                    values: cache.woe_unchecked(x),
                    instance_index: Some(index),
                })
                .collect()
        }
        MethodSpec::Multiclass => {
            let caches = (0..model.n_classes())
                .map(|pos| PairCache::one_vs_rest(model, pos))
                .collect::<Result<Vec<_>>>()?;
            rows.par_iter()
                .enumerate()
                .map(|(index, x)| {
                    let mut totals = vec![0.0; x.len()];
                    for cache in &caches {
                        for (total, phi) in totals.iter_mut().zip(cache.shapley_unchecked(x)) {
                            *total += phi.abs();
                        }
                    }
                    Attribution {
                        method: Method::ShapleyMulticlass,
                        pos_class: None,
                        neg_class: NegClass::Rest,
                        values: totals,
                        instance_index: Some(index),
                    }
                })
                .collect()
        }
        MethodSpec::Bruteforce { pos, neg } => annotate(
            rows.par_iter()
                .map(|x| oracle::shapley_bruteforce(model, x, *pos, *neg))
                .collect::<Result<Vec<_>>>()?,
        ),
        MethodSpec::Sampling { pos, neg, cfg } => annotate(
            rows.par_iter()
                .map(|x| oracle::shapley_sampling(model, x, *pos, *neg, cfg))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(attrs)
}

fn annotate(mut attrs: Vec<Attribution>) -> Vec<Attribution> {
    for (index, attr) in attrs.iter_mut().enumerate() {
        attr.instance_index = Some(index);
    }
    attrs
}

/// Attribute every row into one flat row-major matrix. Same semantics as
/// [`explain_dataset`] with a single output allocation, which keeps the
/// dataset-level cost at O(n·d) with no per-row bookkeeping.
pub fn attribute_matrix(
    model: &NaiveBayesModel,
    rows: &[Vec<usize>],
    spec: &MethodSpec,
) -> Result<AttributionMatrix> {
    for x in rows {
        model.check_instance(x)?;
    }
    let d = model.d();
    let mut values = vec![0.0; rows.len() * d];
    let (pos_class, neg_class) = match spec {
        MethodSpec::Shapley { pos, neg }
        | MethodSpec::Woe { pos, neg }
        | MethodSpec::Bruteforce { pos, neg }
        | MethodSpec::Sampling { pos, neg, .. } => (Some(*pos), *neg),
        MethodSpec::Multiclass => (None, NegClass::Rest),
    };

    match spec {
        MethodSpec::Shapley { pos, neg } => {
            let cache = PairCache::for_pair(model, *pos, *neg)?;
            values
                .par_chunks_exact_mut(d)
                .zip(rows.par_iter())
                .for_each(|(out, x)| cache.shapley_into(x, out));
        }
        MethodSpec::Woe { pos, neg } => {
            let cache = PairCache::for_pair(model, *pos, *neg)?;
            values
                .par_chunks_exact_mut(d)
                .zip(rows.par_iter())
                .for_each(|(out, x)| cache.woe_into(x, out));
        }
        MethodSpec::Multiclass => {
            let caches = (0..model.n_classes())
                .map(|pos| PairCache::one_vs_rest(model, pos))
                .collect::<Result<Vec<_>>>()?;
            values
                .par_chunks_exact_mut(d)
                .zip(rows.par_iter())
                .for_each(|(out, x)| {
                    for cache in &caches {
                        for (m, (&part, slot)) in x.iter().zip(out.iter_mut()).enumerate() {
                            *slot += (cache.weights[m]
                                * (cache.log_ratio[m][part] - cache.expectation[m]))
                                .abs();
                        }
                    }
                });
        }
        MethodSpec::Bruteforce { .. } | MethodSpec::Sampling { .. } => {
            let attrs = explain_dataset(model, rows, spec)?;
            for (out, attr) in values.chunks_exact_mut(d).zip(&attrs) {
                out.copy_from_slice(&attr.values);
            }
        }
    }

    Ok(AttributionMatrix {
        method: spec.tag(),
        pos_class,
        neg_class,
        d,
        values,
    })
}

/// Mean absolute attribution per variable over a dataset.
pub fn global_importance(
    model: &NaiveBayesModel,
    rows: &[Vec<usize>],
    spec: &MethodSpec,
) -> Result<GlobalImportance> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(global_from_matrix(&attribute_matrix(model, rows, spec)?))
}

/// Column means of absolute values, accumulated in fixed row order.
pub fn global_from_matrix(matrix: &AttributionMatrix) -> GlobalImportance {
    let mut sums = vec![0.0; matrix.d];
    for row in matrix.rows() {
        for (sum, v) in sums.iter_mut().zip(row) {
            *sum += v.abs();
        }
    }
    let n = matrix.n_rows().max(1) as f64;
    for sum in &mut sums {
        *sum /= n;
    }
    GlobalImportance {
        method: matrix.method,
        values: sums,
    }
}
