//! Independent verification machinery for the closed-form attributions:
//! the coalition value function, exhaustive Shapley by full enumeration, the
//! posterior deprived of one variable, and a seeded Monte-Carlo permutation
//! estimator over the raw classifier output.
//!
//! The value function of a coalition `u` is the expected log odds given that
//! the variables in `u` are fixed to the instance's parts:
//!
//! ```text
//! v(u) = ln(P(pos)/P(neg)) + Σ_{k∈u} w_k·ln(cond ratio at x_k)
//!                          + Σ_{k∉u} w_k·E[ln(cond ratio)]
//! ```
//!
//! Conditioned variables contribute their instance term, the rest their
//! expectation. Under this game the marginal contribution `v(u+m) - v(u)` is
//! the same for every coalition `u`, which is exactly why the closed form in
//! the `explain` module is the Shapley value.
//!
//! Coalitions are iterated in lexicographic bitmask order so intermediate
//! dumps are comparable across implementations.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::{Attribution, Method, NegClass, PairCache};
use crate::model::NaiveBayesModel;

/// Hard ceiling for exhaustive coalition enumeration (2^20 values).
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Number of Monte-Carlo draws used for one conditional-expectation estimate
/// when exact summation over the remaining parts would be too large.
const MC_DRAWS: usize = 256;

/// A subset of the model's variables, bitset semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn full(d: usize) -> Self {
        debug_assert!(d <= 63);
        Coalition((1u64 << d) - 1)
    }

    pub fn from_members(members: &[usize]) -> Self {
        let mut mask = 0u64;
        for &m in members {
            mask |= 1 << m;
        }
        Coalition(mask)
    }

    pub fn contains(self, m: usize) -> bool {
        self.0 >> m & 1 == 1
    }

    pub fn with(self, m: usize) -> Self {
        Coalition(self.0 | 1 << m)
    }

    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn mask(self) -> u64 {
        self.0
    }
}

/// Which quantity the sampling estimator averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueFunctionKind {
    /// The log-odds game; marginal contributions collapse to the closed form.
    LogOdds,
    /// The raw classifier output `P(pos | x)`, the game a model-agnostic
    /// sampler sees.
    Posterior,
}

/// Configuration of the permutation-sampling estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Number of random variable orderings to average over.
    pub n_permutations: usize,
    pub seed: u64,
    pub value_fn: ValueFunctionKind,
    /// Exact summation over unconditioned parts is used while the product of
    /// their part counts stays at or below this limit; beyond it the
    /// expectation falls back to Monte-Carlo draws from the stored marginals.
    pub exact_sum_limit: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            n_permutations: 2000,
            seed: 42,
            value_fn: ValueFunctionKind::Posterior,
            exact_sum_limit: 1_000_000,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_permutations == 0 {
            return Err(Error::EmptyBudget);
        }
        Ok(())
    }
}

/// Neumaier-compensated summation; keeps coalition values reproducible to a
/// few ulps regardless of coalition size.
fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

/// Value of coalition `u` for instance `x` under a prepared pair cache.
pub fn value_function_with(cache: &PairCache, x: &[usize], u: Coalition) -> f64 {
    let terms = (0..cache.d()).map(|k| {
        if u.contains(k) {
            cache.weight(k) * cache.instance_term(k, x[k])
        } else {
            cache.weight(k) * cache.expectation(k)
        }
    });
    cache.prior_log_ratio() + compensated_sum(terms)
}

/// Value of coalition `u` of variables fixed at `x` for the (pos, neg) game.
pub fn value_function(
    model: &NaiveBayesModel,
    x: &[usize],
    u: Coalition,
    pos: usize,
    neg: NegClass,
) -> Result<f64> {
    let cache = PairCache::for_pair(model, pos, neg)?;
    cache.check_instance(x)?;
    Ok(value_function_with(&cache, x, u))
}

/// Every coalition value in lexicographic bitmask order (index = mask).
/// Guarded at `d <= EXHAUSTIVE_LIMIT`.
pub fn coalition_values(
    model: &NaiveBayesModel,
    x: &[usize],
    pos: usize,
    neg: NegClass,
) -> Result<Vec<f64>> {
    let d = model.d();
    if d > EXHAUSTIVE_LIMIT {
        return Err(Error::CoalitionBlowup {
            d,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let cache = PairCache::for_pair(model, pos, neg)?;
    cache.check_instance(x)?;
    Ok((0u64..1 << d)
        .map(|mask| value_function_with(&cache, x, Coalition(mask)))
        .collect())
}

/// Exhaustive Shapley values by direct enumeration of all coalitions:
/// `phi_m = (1/d) Σ_{u ⊆ -m} (v(u+m) - v(u)) / C(d-1, |u|)`.
pub fn shapley_bruteforce(
    model: &NaiveBayesModel,
    x: &[usize],
    pos: usize,
    neg: NegClass,
) -> Result<Attribution> {
    let d = model.d();
    let values = coalition_values(model, x, pos, neg)?;
    let binom = pascal_row(d.saturating_sub(1));
    let mut phi = Vec::with_capacity(d);
    for m in 0..d {
        let bit = 1u64 << m;
        let mut sum = 0.0;
        for mask in 0u64..1 << d {
            if mask & bit != 0 {
                continue;
            }
            let size = mask.count_ones() as usize;
            sum += (values[(mask | bit) as usize] - values[mask as usize]) / binom[size];
        }
        phi.push(sum / d as f64);
    }
    Ok(Attribution {
        method: Method::Bruteforce,
        pos_class: Some(pos),
        neg_class: neg,
        values: phi,
        instance_index: None,
    })
}

fn pascal_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..=n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

/// Posterior with variable `m` marginalized out: priors times the weighted
/// conditionals of every variable except `m`, normalized. Erasing a variable
/// whose conditionals do not depend on the class leaves the posterior
/// unchanged.
pub fn deprive(model: &NaiveBayesModel, x: &[usize], m: usize) -> Result<Vec<f64>> {
    model.check_instance(x)?;
    if m >= model.d() {
        return Err(Error::VariableIndex {
            index: m,
            count: model.d(),
        });
    }
    let scores: Vec<f64> = (0..model.n_classes())
        .map(|k| {
            let mut score = model.priors[k].ln();
            for (i, &part) in x.iter().enumerate() {
                if i != m {
                    score += model.weights[i] * model.cond[i][k][part].ln();
                }
            }
            score
        })
        .collect();
    let max = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut probs: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

/// Weight of Evidence computed the long way round: the log odds ratio between
/// the full posterior and the posterior deprived of variable `m`. The
/// deprived model drops `m`'s weighted factor, so the weight is already
/// accounted for and the result equals the direct `w_m·ln(cond ratio)` form.
pub fn woe_via_deprivation(
    model: &NaiveBayesModel,
    x: &[usize],
    m: usize,
    pos: usize,
    neg: NegClass,
) -> Result<f64> {
    model.check_class(pos)?;
    let full = model.predict_proba(x)?;
    let deprived = deprive(model, x, m)?;
    let neg_prob = |probs: &[f64]| -> Result<f64> {
        match neg {
            NegClass::Class(n) => {
                model.check_class(n)?;
                if n == pos {
                    return Err(Error::SameClassPair(pos));
                }
                Ok(probs[n])
            }
            NegClass::Rest => Ok(probs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != pos)
                .map(|(_, p)| p)
                .sum()),
        }
    };
    Ok(full[pos].ln() - neg_prob(&full)?.ln() - deprived[pos].ln() + neg_prob(&deprived)?.ln())
}

/// Permutation-sampling Shapley estimator.
///
/// For each of `n_permutations` seeded random orderings, every variable is
/// credited with `v(pred ∪ {m}) - v(pred)` where `pred` are its predecessors
/// in the ordering; the estimate is the per-variable mean in permutation
/// order. In log-odds mode the marginal contribution does not depend on the
/// predecessors, so the estimator returns the closed form unchanged. In
/// posterior mode `v(u) = E[P(pos | X) | X_u = x_u]`, evaluated by exact
/// summation over the unconditioned parts while the product of their part
/// counts stays within `exact_sum_limit`, and by Monte-Carlo draws from the
/// stored marginals beyond it. Each Monte-Carlo estimate is seeded by the
/// coalition itself, so results are identical for a given seed regardless of
/// worker count.
pub fn shapley_sampling(
    model: &NaiveBayesModel,
    x: &[usize],
    pos: usize,
    neg: NegClass,
    cfg: &SamplingConfig,
) -> Result<Attribution> {
    cfg.validate()?;
    let cache = PairCache::for_pair(model, pos, neg)?;
    cache.check_instance(x)?;
    let d = model.d();

    let values = match cfg.value_fn {
        ValueFunctionKind::LogOdds => {
            // Independence collapse: v(u+m) - v(u) is the same for every u,
            // so the permutation average is the closed form itself.
            cache.shapley(x)?
        }
        ValueFunctionKind::Posterior => {
            let evaluator = PosteriorEvaluator::new(model, x, pos, cfg);
            let per_permutation: Vec<Vec<f64>> = (0..cfg.n_permutations)
                .into_par_iter()
                .map(|t| {
                    let mut rng = permutation_rng(cfg.seed, t as u64);
                    let mut order: Vec<usize> = (0..d).collect();
                    order.shuffle(&mut rng);
                    let mut contrib = vec![0.0; d];
                    let mut membership = vec![false; d];
                    let mut prev = evaluator.value(&membership);
                    for &m in &order {
                        membership[m] = true;
                        let next = evaluator.value(&membership);
                        contrib[m] = next - prev;
                        prev = next;
                    }
                    contrib
                })
                .collect();
            // Reduce in permutation-index order for run-to-run determinism.
            let mut totals = vec![0.0; d];
            for contrib in &per_permutation {
                for (t, c) in totals.iter_mut().zip(contrib) {
                    *t += c;
                }
            }
            let n = cfg.n_permutations as f64;
            totals.iter_mut().for_each(|t| *t /= n);
            totals
        }
    };

    Ok(Attribution {
        method: Method::Sampling,
        pos_class: Some(pos),
        neg_class: neg,
        values,
        instance_index: None,
    })
}

fn permutation_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 << 63 | index);
    rng
}

fn coalition_rng(seed: u64, membership: &[bool]) -> ChaCha8Rng {
    // Derive the stream from the coalition itself so an estimate depends only
    // on (seed, coalition), never on scheduling.
    let mut stream: u64 = 0xcbf2_9ce4_8422_2325;
    for (k, &inside) in membership.iter().enumerate() {
        if inside {
            stream ^= (k as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
            stream = stream.wrapping_mul(0x1000_0000_01b3);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream & !(1 << 63));
    rng
}

/// Conditional expectation of the positive-class posterior given a coalition
/// of fixed variables.
struct PosteriorEvaluator<'a> {
    model: &'a NaiveBayesModel,
    x: &'a [usize],
    pos: usize,
    seed: u64,
    exact_limit: u64,
    ln_priors: Vec<f64>,
    /// `ln_cond[i][k][p] = w_i · ln cond[i][k][p]`, precomputed once.
    ln_cond: Vec<Vec<Vec<f64>>>,
    memo: Mutex<HashMap<u64, f64>>,
}

impl<'a> PosteriorEvaluator<'a> {
    fn new(model: &'a NaiveBayesModel, x: &'a [usize], pos: usize, cfg: &SamplingConfig) -> Self {
        let ln_priors = model.priors.iter().map(|p| p.ln()).collect();
        let ln_cond = model
            .cond
            .iter()
            .enumerate()
            .map(|(i, table)| {
                table
                    .iter()
                    .map(|row| row.iter().map(|p| model.weights[i] * p.ln()).collect())
                    .collect()
            })
            .collect();
        Self {
            model,
            x,
            pos,
            seed: cfg.seed,
            exact_limit: cfg.exact_sum_limit,
            ln_priors,
            ln_cond,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn posterior_pos(&self, parts: &[usize]) -> f64 {
        let k = self.model.n_classes();
        let mut scores = Vec::with_capacity(k);
        for class in 0..k {
            let mut score = self.ln_priors[class];
            for (i, &part) in parts.iter().enumerate() {
                score += self.ln_cond[i][class][part];
            }
            scores.push(score);
        }
        let max = scores.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let total: f64 = scores.iter().map(|&s| (s - max).exp()).sum();
        (scores[self.pos] - max).exp() / total
    }

    fn value(&self, membership: &[bool]) -> f64 {
        let d = membership.len();
        let mask_key = (d <= 63).then(|| {
            membership
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &inside)| acc | (u64::from(inside) << k))
        });
        if let Some(key) = mask_key {
            if let Some(&v) = self.memo.lock().unwrap().get(&key) {
                return v;
            }
        }

        let free: Vec<usize> = (0..d).filter(|&k| !membership[k]).collect();
        let mut product: u64 = 1;
        for &k in &free {
            product = product.saturating_mul(self.model.part_count(k) as u64);
        }
        let value = if product <= self.exact_limit {
            self.exact_expectation(&free)
        } else {
            self.sampled_expectation(&free, membership)
        };

        if let Some(key) = mask_key {
            self.memo.lock().unwrap().insert(key, value);
        }
        value
    }

    /// Exact sum over every part assignment of the free variables, weighted
    /// by the product of stored marginals.
    fn exact_expectation(&self, free: &[usize]) -> f64 {
        let mut parts = self.x.to_vec();
        if free.is_empty() {
            return self.posterior_pos(&parts);
        }
        for &k in free {
            parts[k] = 0;
        }
        let mut acc = 0.0;
        let mut total_weight = 0.0;
        loop {
            let mut weight = 1.0;
            for &k in free {
                weight *= self.model.marginal[k][parts[k]];
            }
            acc += weight * self.posterior_pos(&parts);
            total_weight += weight;

            // Odometer increment over the free variables.
            let mut pos = 0;
            loop {
                if pos == free.len() {
                    return acc / total_weight;
                }
                let k = free[pos];
                parts[k] += 1;
                if parts[k] < self.model.part_count(k) {
                    break;
                }
                parts[k] = 0;
                pos += 1;
            }
        }
    }

    fn sampled_expectation(&self, free: &[usize], membership: &[bool]) -> f64 {
        let mut rng = coalition_rng(self.seed, membership);
        let mut parts = self.x.to_vec();
        let mut acc = 0.0;
        for _ in 0..MC_DRAWS {
            for &k in free {
                parts[k] = sample_part(&self.model.marginal[k], &mut rng);
            }
            acc += self.posterior_pos(&parts);
        }
        acc / MC_DRAWS as f64
    }
}

fn sample_part(marginal: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (p, &w) in marginal.iter().enumerate() {
        cum += w;
        if u < cum {
            return p;
        }
    }
    marginal.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{random_fitted, random_instances, toy_model, RandomModelSpec};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn value_of_empty_and_full_coalitions() {
        let model = toy_model();
        let x = [0, 0, 0];
        let empty = value_function(&model, &x, Coalition::EMPTY, 1, NegClass::Class(0)).unwrap();
        assert!(close(empty, 0.0, 1e-15));
        let full = value_function(&model, &x, Coalition::full(3), 1, NegClass::Class(0)).unwrap();
        assert!(close(full, model.log_odds(&x, 1, 0).unwrap(), 1e-12));
        assert!(close(full, 1.791759, 1e-6));
    }

    #[test]
    fn singleton_coalition_value() {
        let model = toy_model();
        let v = value_function(
            &model,
            &[0, 0, 0],
            Coalition::from_members(&[0]),
            1,
            NegClass::Class(0),
        )
        .unwrap();
        assert!(close(v, 4f64.ln(), 1e-12));
    }

    #[test]
    fn bruteforce_matches_closed_form_on_the_toy_model() {
        let model = toy_model();
        let bf = shapley_bruteforce(&model, &[0, 0, 0], 1, NegClass::Class(0)).unwrap();
        assert!(close(bf.values[0], 1.386294, 1e-6));
        assert!(close(bf.values[1], 0.405465, 1e-6));
        assert!(close(bf.values[2], 0.0, 1e-12));
        let analytic = crate::explain::shapley_analytic(&model, &[0, 0, 0], 1, 0).unwrap();
        for (a, b) in bf.values.iter().zip(&analytic.values) {
            assert!(close(*a, *b, 1e-12));
        }
    }

    #[test]
    fn single_variable_game() {
        let mut model = toy_model();
        model.preprocessor.partitions.truncate(1);
        model.cond.truncate(1);
        model.marginal.truncate(1);
        model.weights.truncate(1);
        model.validate().unwrap();
        let bf = shapley_bruteforce(&model, &[0], 1, NegClass::Class(0)).unwrap();
        let v1 = value_function(&model, &[0], Coalition::from_members(&[0]), 1, NegClass::Class(0))
            .unwrap();
        let v0 = value_function(&model, &[0], Coalition::EMPTY, 1, NegClass::Class(0)).unwrap();
        assert!(close(bf.values[0], v1 - v0, 1e-15));
    }

    #[test]
    fn marginal_contribution_is_coalition_independent() {
        let model = random_fitted(7, &RandomModelSpec::default());
        let x = random_instances(8, &model, 1).remove(0);
        let values = coalition_values(&model, &x, 1, NegClass::Class(0)).unwrap();
        let d = model.d();
        for m in 0..d {
            let bit = 1u64 << m;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for mask in 0u64..1 << d {
                if mask & bit != 0 {
                    continue;
                }
                let diff = values[(mask | bit) as usize] - values[mask as usize];
                lo = lo.min(diff);
                hi = hi.max(diff);
            }
            assert!(hi - lo < 1e-12, "variable {m}: spread {}", hi - lo);
        }
    }

    #[test]
    fn bruteforce_equals_analytic_on_random_models() {
        for seed in 0..12u64 {
            let spec = RandomModelSpec {
                d: 2 + (seed as usize % 7),
                ..RandomModelSpec::default()
            };
            let model = random_fitted(seed, &spec);
            for x in random_instances(seed ^ 0xbeef, &model, 5) {
                let bf = shapley_bruteforce(&model, &x, 1, NegClass::Class(0)).unwrap();
                let an = crate::explain::shapley_analytic(&model, &x, 1, 0).unwrap();
                for (a, b) in bf.values.iter().zip(&an.values) {
                    assert!(close(*a, *b, 1e-9), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn bruteforce_efficiency_axiom() {
        let model = random_fitted(17, &RandomModelSpec::default());
        let x = random_instances(18, &model, 1).remove(0);
        let bf = shapley_bruteforce(&model, &x, 0, NegClass::Class(1)).unwrap();
        let total: f64 = bf.values.iter().sum();
        let v_full =
            value_function(&model, &x, Coalition::full(model.d()), 0, NegClass::Class(1)).unwrap();
        let v_empty = value_function(&model, &x, Coalition::EMPTY, 0, NegClass::Class(1)).unwrap();
        assert!(close(total, v_full - v_empty, 1e-9));
    }

    #[test]
    fn symmetry_axiom_for_duplicated_variables() {
        let mut model = toy_model();
        // Make variable 2 an exact copy of variable 0.
        model.cond[2] = model.cond[0].clone();
        model.marginal[2] = model.marginal[0].clone();
        model.validate().unwrap();
        let bf = shapley_bruteforce(&model, &[0, 1, 0], 1, NegClass::Class(0)).unwrap();
        assert!((bf.values[0] - bf.values[2]).abs() < 1e-12);
    }

    #[test]
    fn blowup_guard_names_the_cost() {
        let spec = RandomModelSpec {
            d: EXHAUSTIVE_LIMIT + 1,
            rows: 120,
            ..RandomModelSpec::default()
        };
        let model = random_fitted(23, &spec);
        let x = vec![0; model.d()];
        match shapley_bruteforce(&model, &x, 0, NegClass::Class(1)) {
            Err(Error::CoalitionBlowup { d, limit }) => {
                assert_eq!(d, EXHAUSTIVE_LIMIT + 1);
                assert_eq!(limit, EXHAUSTIVE_LIMIT);
            }
            other => panic!("expected blowup guard, got {other:?}"),
        }
    }

    #[test]
    fn depriving_a_null_variable_changes_nothing() {
        let model = toy_model();
        let x = [0, 0, 0];
        let full = model.predict_proba(&x).unwrap();
        let deprived = deprive(&model, &x, 2).unwrap();
        for (a, b) in full.iter().zip(&deprived) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn deprivation_matches_hand_computation() {
        let model = toy_model();
        let deprived = deprive(&model, &[0, 0, 0], 0).unwrap();
        assert!(close(deprived[1], 0.6, 1e-14), "got {}", deprived[1]);
    }

    #[test]
    fn depriving_the_only_variable_recovers_the_priors() {
        let mut model = toy_model();
        model.preprocessor.partitions.truncate(1);
        model.cond.truncate(1);
        model.marginal.truncate(1);
        model.weights.truncate(1);
        model.priors = vec![0.3, 0.7];
        model.validate().unwrap();
        let deprived = deprive(&model, &[0], 0).unwrap();
        assert!(close(deprived[0], 0.3, 1e-14));
        assert!(close(deprived[1], 0.7, 1e-14));
    }

    #[test]
    fn deprivation_route_reproduces_the_direct_woe() {
        let model = toy_model();
        let via = woe_via_deprivation(&model, &[0, 0, 0], 0, 1, NegClass::Class(0)).unwrap();
        assert!(close(via, 1.386294, 1e-6));

        for seed in [3u64, 5, 9] {
            let spec = RandomModelSpec {
                random_weights: true,
                ..RandomModelSpec::default()
            };
            let model = random_fitted(seed, &spec);
            for x in random_instances(seed + 100, &model, 5) {
                let direct = crate::explain::woe(&model, &x, 1, 0).unwrap();
                for m in 0..model.d() {
                    let via =
                        woe_via_deprivation(&model, &x, m, 1, NegClass::Class(0)).unwrap();
                    assert!(
                        close(via, direct.values[m], 1e-10),
                        "m={m}: {via} vs {}",
                        direct.values[m]
                    );
                }
            }
        }
    }

    #[test]
    fn null_variable_has_zero_deprivation_woe() {
        let model = toy_model();
        let via = woe_via_deprivation(&model, &[1, 1, 1], 2, 1, NegClass::Class(0)).unwrap();
        assert!(close(via, 0.0, 1e-14));
    }

    #[test]
    fn log_odds_sampling_collapses_to_the_closed_form() {
        let model = random_fitted(33, &RandomModelSpec::default());
        let x = random_instances(34, &model, 1).remove(0);
        let analytic = crate::explain::shapley_analytic(&model, &x, 1, 0).unwrap();
        for n in [1usize, 7] {
            let cfg = SamplingConfig {
                n_permutations: n,
                value_fn: ValueFunctionKind::LogOdds,
                ..SamplingConfig::default()
            };
            let est = shapley_sampling(&model, &x, 1, NegClass::Class(0), &cfg).unwrap();
            assert_eq!(est.values, analytic.values);
        }
    }

    #[test]
    fn posterior_sampling_ranks_the_toy_variables_correctly() {
        let model = toy_model();
        let cfg = SamplingConfig {
            n_permutations: 2000,
            ..SamplingConfig::default()
        };
        let est = shapley_sampling(&model, &[0, 0, 0], 1, NegClass::Class(0), &cfg).unwrap();
        // The null variable never moves the posterior.
        assert!(est.values[2].abs() < 1e-12);
        assert!(est.values[0] > est.values[1]);
        let analytic = crate::explain::shapley_analytic(&model, &[0, 0, 0], 1, 0).unwrap();
        let tau = crate::metrics::kendall_tau_b(&est.values, &analytic.values).unwrap();
        assert_eq!(tau, 1.0);
    }

    #[test]
    fn posterior_sampling_telescopes_to_the_posterior_gap() {
        // With exact summation the per-permutation contributions telescope,
        // so the estimate sums to P(pos|x) - E[P(pos|X)] up to rounding.
        let model = random_fitted(43, &RandomModelSpec::default());
        let x = random_instances(44, &model, 1).remove(0);
        let cfg = SamplingConfig {
            n_permutations: 50,
            ..SamplingConfig::default()
        };
        let est = shapley_sampling(&model, &x, 1, NegClass::Class(0), &cfg).unwrap();
        let total: f64 = est.values.iter().sum();
        let evaluator = PosteriorEvaluator::new(&model, &x, 1, &cfg);
        let baseline = evaluator.value(&vec![false; model.d()]);
        let posterior = model.predict_proba(&x).unwrap()[1];
        assert!(close(total, posterior - baseline, 1e-10));
    }

    #[test]
    fn monte_carlo_fallback_stays_within_three_sigma() {
        let model = random_fitted(53, &RandomModelSpec::default());
        let x = random_instances(54, &model, 1).remove(0);
        // Force the Monte-Carlo path and compare against the exact-sum path
        // over repeated seeds.
        let exact_cfg = SamplingConfig {
            n_permutations: 200,
            ..SamplingConfig::default()
        };
        let exact = shapley_sampling(&model, &x, 1, NegClass::Class(0), &exact_cfg).unwrap();
        let exact_total: f64 = exact.values.iter().sum();

        let mut totals = Vec::new();
        for seed in 0..8u64 {
            let cfg = SamplingConfig {
                n_permutations: 200,
                seed,
                exact_sum_limit: 1,
                ..SamplingConfig::default()
            };
            let est = shapley_sampling(&model, &x, 1, NegClass::Class(0), &cfg).unwrap();
            totals.push(est.values.iter().sum::<f64>());
        }
        let mean = totals.iter().sum::<f64>() / totals.len() as f64;
        let var = totals.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>()
            / totals.len() as f64;
        let sigma = var.sqrt().max(1e-6);
        assert!(
            (mean - exact_total).abs() <= 3.0 * sigma,
            "mean {mean} vs exact {exact_total} (sigma {sigma})"
        );
    }

    #[test]
    fn sampling_is_deterministic_across_worker_counts() {
        let model = random_fitted(63, &RandomModelSpec::default());
        let x = random_instances(64, &model, 1).remove(0);
        let cfg = SamplingConfig {
            n_permutations: 64,
            exact_sum_limit: 1, // exercise the seeded Monte-Carlo path too
            ..SamplingConfig::default()
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| shapley_sampling(&model, &x, 1, NegClass::Class(0), &cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| shapley_sampling(&model, &x, 1, NegClass::Class(0), &cfg).unwrap());
        assert_eq!(single.values, many.values);
    }

    #[test]
    fn single_variable_sampling_is_budget_independent() {
        let mut model = toy_model();
        model.preprocessor.partitions.truncate(1);
        model.cond.truncate(1);
        model.marginal.truncate(1);
        model.weights.truncate(1);
        model.validate().unwrap();
        let one = SamplingConfig {
            n_permutations: 1,
            ..SamplingConfig::default()
        };
        let thousand = SamplingConfig {
            n_permutations: 1000,
            ..SamplingConfig::default()
        };
        let a = shapley_sampling(&model, &[0], 1, NegClass::Class(0), &one).unwrap();
        let b = shapley_sampling(&model, &[0], 1, NegClass::Class(0), &thousand).unwrap();
        assert!(close(a.values[0], b.values[0], 1e-12));

        // With more than one variable the posterior game is order dependent.
        let model = toy_model();
        let a = shapley_sampling(&model, &[0, 0, 0], 1, NegClass::Class(0), &one).unwrap();
        let b = shapley_sampling(&model, &[0, 0, 0], 1, NegClass::Class(0), &thousand).unwrap();
        assert!(a.values != b.values);
    }

    #[test]
    fn empty_budget_is_rejected() {
        let cfg = SamplingConfig {
            n_permutations: 0,
            ..SamplingConfig::default()
        };
        let model = toy_model();
        assert!(matches!(
            shapley_sampling(&model, &[0, 0, 0], 1, NegClass::Class(0), &cfg),
            Err(Error::EmptyBudget)
        ));
    }
}
