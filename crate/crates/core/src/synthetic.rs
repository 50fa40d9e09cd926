//! Deterministic model and data generators used by the benchmark command and
//! the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{ColumnKind, Schema};
use crate::model::{fit, MarginalMode, NaiveBayesModel};
use crate::preprocess::{PartDataset, PartitionKind, Preprocessor, VariablePartition};

/// A small fully specified binary model: three binary variables with a
/// strong, a weak, and a class-independent conditional, uniform priors and
/// uniform marginals, unit weights. Handy for hand-checkable attributions.
pub fn toy_model() -> NaiveBayesModel {
    let model = NaiveBayesModel {
        preprocessor: synthetic_preprocessor(&[2, 2, 2]),
        class_labels: vec!["y0".to_string(), "y1".to_string()],
        priors: vec![0.5, 0.5],
        cond: vec![
            vec![vec![0.2, 0.8], vec![0.8, 0.2]],
            vec![vec![0.4, 0.6], vec![0.6, 0.4]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        ],
        marginal: vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]],
        weights: vec![1.0, 1.0, 1.0],
        smoothing: 0.0,
        marginal_mode: MarginalMode::Empirical,
    };
    model.validate().expect("toy model invariants");
    model
}

/// A three-class model whose first variable separates class 0 sharply while
/// the second is barely informative and the third is class independent.
pub fn three_class_model() -> NaiveBayesModel {
    let priors = vec![0.4, 0.3, 0.3];
    let cond = vec![
        vec![vec![0.9, 0.1], vec![0.3, 0.7], vec![0.3, 0.7]],
        vec![vec![0.5, 0.5], vec![0.55, 0.45], vec![0.5, 0.5]],
        vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]],
    ];
    let marginal = mixture_marginals(&cond, &priors);
    let model = NaiveBayesModel {
        preprocessor: synthetic_preprocessor(&[2, 2, 2]),
        class_labels: vec!["c0".to_string(), "c1".to_string(), "c2".to_string()],
        priors,
        cond,
        marginal,
        weights: vec![1.0, 1.0, 1.0],
        smoothing: 0.0,
        marginal_mode: MarginalMode::Mixture,
    };
    model.validate().expect("three-class model invariants");
    model
}

/// Shape of a randomly generated, then fitted, model.
#[derive(Debug, Clone)]
pub struct RandomModelSpec {
    pub d: usize,
    pub classes: usize,
    pub parts_min: usize,
    pub parts_max: usize,
    pub rows: usize,
    pub smoothing: f64,
    pub random_weights: bool,
    pub marginal_mode: MarginalMode,
}

impl Default for RandomModelSpec {
    fn default() -> Self {
        Self {
            d: 6,
            classes: 2,
            parts_min: 2,
            parts_max: 5,
            rows: 80,
            smoothing: 0.5,
            random_weights: true,
            marginal_mode: MarginalMode::Empirical,
        }
    }
}

/// Draw a latent model, sample `rows` labeled part rows from it, and fit a
/// smoothed model on that sample. Everything is a pure function of the seed.
pub fn random_fitted(seed: u64, spec: &RandomModelSpec) -> NaiveBayesModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let part_counts: Vec<usize> = (0..spec.d)
        .map(|_| rng.random_range(spec.parts_min..=spec.parts_max))
        .collect();
    let prep = synthetic_preprocessor(&part_counts);

    let latent_priors = dirichlet(&mut rng, spec.classes);
    let latent_cond: Vec<Vec<Vec<f64>>> = (0..spec.d)
        .map(|i| {
            (0..spec.classes)
                .map(|_| dirichlet(&mut rng, part_counts[i]))
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(spec.rows);
    let mut labels = Vec::with_capacity(spec.rows);
    for _ in 0..spec.rows {
        let class = sample_index(&latent_priors, &mut rng);
        let row: Vec<usize> = (0..spec.d)
            .map(|i| sample_index(&latent_cond[i][class], &mut rng))
            .collect();
        rows.push(row);
        labels.push(class);
    }
    let parts = PartDataset {
        schema: synthetic_schema(spec.d, spec.classes),
        rows,
        labels,
    };

    let weights: Option<Vec<f64>> = spec
        .random_weights
        .then(|| (0..spec.d).map(|_| rng.random::<f64>()).collect());
    fit(
        &parts,
        &prep,
        weights.as_deref(),
        spec.smoothing,
        spec.marginal_mode,
    )
    .expect("synthetic fit")
}

/// Build a model directly: uniform priors, conditional tables drawn from a
/// symmetric Dirichlet with concentration 1, marginals as the prior-weighted
/// mixture, unit weights. Used for benchmark inputs so they are
/// reconstructible from the seed alone.
pub fn random_model(seed: u64, d: usize, classes: usize, parts: usize) -> NaiveBayesModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let priors = vec![1.0 / classes as f64; classes];
    let cond: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|_| (0..classes).map(|_| dirichlet(&mut rng, parts)).collect())
        .collect();
    let marginal = mixture_marginals(&cond, &priors);
    let model = NaiveBayesModel {
        preprocessor: synthetic_preprocessor(&vec![parts; d]),
        class_labels: (0..classes).map(|k| format!("c{k}")).collect(),
        priors,
        cond,
        marginal,
        weights: vec![1.0; d],
        smoothing: 0.0,
        marginal_mode: MarginalMode::Mixture,
    };
    model.validate().expect("synthetic model invariants");
    model
}

/// Part rows drawn from the model's stored marginals.
pub fn random_part_rows(seed: u64, model: &NaiveBayesModel, n: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..model.d())
                .map(|i| sample_index(&model.marginal[i], &mut rng))
                .collect()
        })
        .collect()
}

/// Part rows drawn uniformly over each variable's parts.
pub fn random_instances(seed: u64, model: &NaiveBayesModel, n: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..model.d())
                .map(|i| rng.random_range(0..model.part_count(i)))
                .collect()
        })
        .collect()
}

fn synthetic_preprocessor(part_counts: &[usize]) -> Preprocessor {
    Preprocessor {
        partitions: part_counts
            .iter()
            .enumerate()
            .map(|(i, &parts)| VariablePartition {
                variable: format!("v{i}"),
                kind: PartitionKind::Intervals {
                    cuts: (1..parts).map(|c| c as f64).collect(),
                },
                part_count: parts,
                missing_part: None,
            })
            .collect(),
    }
}

fn synthetic_schema(d: usize, classes: usize) -> Schema {
    Schema {
        columns: (0..d)
            .map(|i| (format!("v{i}"), ColumnKind::Numeric))
            .collect(),
        target: "class".to_string(),
        class_labels: (0..classes).map(|k| format!("c{k}")).collect(),
    }
}

fn mixture_marginals(cond: &[Vec<Vec<f64>>], priors: &[f64]) -> Vec<Vec<f64>> {
    cond.iter()
        .map(|table| {
            let parts = table[0].len();
            (0..parts)
                .map(|p| table.iter().zip(priors).map(|(row, &w)| row[p] * w).sum())
                .collect()
        })
        .collect()
}

/// Symmetric Dirichlet(1) sample: normalized unit exponentials, floored away
/// from zero so every stored probability stays strictly positive.
fn dirichlet(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut cells: Vec<f64> = (0..len)
        .map(|_| (-(1.0 - rng.random::<f64>()).ln()).max(1e-9))
        .collect();
    let total: f64 = cells.iter().sum();
    for c in &mut cells {
        *c /= total;
    }
    cells
}

fn sample_index(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cum += w;
        if u < cum {
            return i;
        }
    }
    weights.len() - 1
}
