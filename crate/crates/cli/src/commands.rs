//! Command implementations and the exit-code policy:
//! 0 success, 1 usage/configuration error, 2 verification failure,
//! 3 I/O, format, or data error.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use bayes_attrib::data::{infer_schema, load_csv, load_features_csv, CsvOptions};
use bayes_attrib::explain::{self, MethodSpec, NegClass};
use bayes_attrib::metrics;
use bayes_attrib::model::{fit, MarginalMode, NaiveBayesModel};
use bayes_attrib::oracle::{self, SamplingConfig, ValueFunctionKind};
use bayes_attrib::preprocess::{encode, encode_instance, fit_partitions};
use bayes_attrib::synthetic;
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::args::{
    BenchArgs, Command, CompareArgs, ExplainArgs, GlobalArgs, MarginalArg, TrainArgs,
    ValueFnArg, VerifyArgs,
};
use crate::report;

pub struct AppError {
    pub message: String,
    pub exit_code: i32,
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn usage(message: impl fmt::Display) -> AppError {
    AppError {
        message: message.to_string(),
        exit_code: 1,
    }
}

fn verification(message: impl fmt::Display) -> AppError {
    AppError {
        message: message.to_string(),
        exit_code: 2,
    }
}

fn data_err(message: impl fmt::Display) -> AppError {
    AppError {
        message: message.to_string(),
        exit_code: 3,
    }
}

pub fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Train(args) => train(&args),
        Command::Explain(args) => explain_cmd(&args),
        Command::Verify(args) => verify(&args),
        Command::Compare(args) => compare(&args),
        Command::Global(args) => global(&args),
        Command::Bench(args) => bench(&args),
    }
}

fn train(args: &TrainArgs) -> Result<(), AppError> {
    let opts = CsvOptions::from_marker_list(&args.missing);
    let mut schema = infer_schema(&args.data, &args.target, &opts).map_err(|e| match e {
        // A bad --target names a flag value, not broken data.
        bayes_attrib::Error::UnknownColumn { .. } => usage(e),
        other => data_err(other),
    })?;
    if let Some(columns) = &args.columns {
        let keep: Vec<String> = columns.split(',').map(str::to_string).collect();
        schema.retain_columns(&keep).map_err(usage)?;
    }
    let dataset = load_csv(&args.data, &schema, &opts).map_err(data_err)?;
    let prep = fit_partitions(&dataset, args.bins, args.max_groups).map_err(usage)?;
    let parts = encode(&prep, &dataset).map_err(data_err)?;

    let weights: Option<Vec<f64>> = match &args.weights {
        None => None,
        Some(path) => Some(read_weights(path, &schema.columns)?),
    };
    let marginal_mode = match args.marginal {
        MarginalArg::Empirical => MarginalMode::Empirical,
        MarginalArg::Mixture => MarginalMode::Mixture,
    };
    let model = fit(
        &parts,
        &prep,
        weights.as_deref(),
        args.smoothing,
        marginal_mode,
    )
    .map_err(data_err)?;
    model.save(&args.out).map_err(data_err)?;
    eprintln!(
        "trained on {} rows, {} variables, {} classes -> {}",
        dataset.len(),
        model.d(),
        model.n_classes(),
        args.out.display()
    );
    Ok(())
}

/// Weights file: a JSON object mapping every feature column to its weight.
fn read_weights(
    path: &Path,
    columns: &[(String, bayes_attrib::data::ColumnKind)],
) -> Result<Vec<f64>, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    let map: Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| data_err(format!("{}: not a JSON object: {e}", path.display())))?;
    columns
        .iter()
        .map(|(name, _)| {
            map.get(name)
                .and_then(Value::as_f64)
                .ok_or_else(|| usage(format!("weights file has no numeric entry for column {name:?}")))
        })
        .collect()
}

/// Load the data file against the model's feature columns and encode it.
fn load_encoded(
    model: &NaiveBayesModel,
    data: &Path,
    missing: &str,
) -> Result<Vec<Vec<usize>>, AppError> {
    let opts = CsvOptions::from_marker_list(missing);
    let instances = load_features_csv(data, &model.feature_columns(), &opts).map_err(data_err)?;
    instances
        .iter()
        .map(|x| encode_instance(&model.preprocessor, x).map_err(data_err))
        .collect()
}

/// Resolve the positive class and the negative side for a two-sided method.
/// With two classes the negative side is the other class; with more it is the
/// pooled rest.
fn resolve_orientation(
    model: &NaiveBayesModel,
    class: Option<&str>,
) -> Result<(usize, NegClass), AppError> {
    let label = class.ok_or_else(|| {
        usage(format!(
            "--class is required for this method; valid labels: {:?}",
            model.class_labels
        ))
    })?;
    let pos = model.label_index(label).map_err(usage)?;
    let neg = if model.n_classes() == 2 {
        NegClass::Class(1 - pos)
    } else {
        NegClass::Rest
    };
    Ok((pos, neg))
}

fn resolve_method(
    model: &NaiveBayesModel,
    method: &str,
    class: Option<&str>,
    value_fn: ValueFnArg,
    budget: usize,
    seed: u64,
) -> Result<MethodSpec, AppError> {
    match method {
        "multiclass" => Ok(MethodSpec::Multiclass),
        "shapley" => {
            let (pos, neg) = resolve_orientation(model, class)?;
            Ok(MethodSpec::Shapley { pos, neg })
        }
        "woe" => {
            let (pos, neg) = resolve_orientation(model, class)?;
            Ok(MethodSpec::Woe { pos, neg })
        }
        "bruteforce" => {
            let (pos, neg) = resolve_orientation(model, class)?;
            Ok(MethodSpec::Bruteforce { pos, neg })
        }
        "sampling" => {
            let (pos, neg) = resolve_orientation(model, class)?;
            Ok(MethodSpec::Sampling {
                pos,
                neg,
                cfg: SamplingConfig {
                    n_permutations: budget,
                    seed,
                    value_fn: match value_fn {
                        ValueFnArg::Posterior => ValueFunctionKind::Posterior,
                        ValueFnArg::Logodds => ValueFunctionKind::LogOdds,
                    },
                    ..SamplingConfig::default()
                },
            })
        }
        other => Err(usage(format!(
            "unknown method {other:?}; expected shapley, woe, multiclass, sampling, or bruteforce"
        ))),
    }
}

fn neg_class_json(model: &NaiveBayesModel, spec: &MethodSpec) -> Value {
    let neg = match spec {
        MethodSpec::Shapley { neg, .. }
        | MethodSpec::Woe { neg, .. }
        | MethodSpec::Bruteforce { neg, .. }
        | MethodSpec::Sampling { neg, .. } => *neg,
        MethodSpec::Multiclass => NegClass::Rest,
    };
    match neg {
        NegClass::Class(k) => json!(model.class_labels[k]),
        NegClass::Rest => json!("rest"),
    }
}

fn pos_class_json(model: &NaiveBayesModel, spec: &MethodSpec) -> Value {
    match spec {
        MethodSpec::Shapley { pos, .. }
        | MethodSpec::Woe { pos, .. }
        | MethodSpec::Bruteforce { pos, .. }
        | MethodSpec::Sampling { pos, .. } => json!(model.class_labels[*pos]),
        MethodSpec::Multiclass => Value::Null,
    }
}

fn run_spec_error(e: bayes_attrib::Error) -> AppError {
    match e {
        bayes_attrib::Error::CoalitionBlowup { .. } => usage(e),
        other => data_err(other),
    }
}

fn explain_cmd(args: &ExplainArgs) -> Result<(), AppError> {
    let model = NaiveBayesModel::load(&args.model).map_err(data_err)?;
    let rows = load_encoded(&model, &args.data, &args.missing)?;
    let spec = resolve_method(
        &model,
        &args.method,
        args.class.as_deref(),
        args.value_fn,
        args.budget,
        args.seed,
    )?;

    let matrix = explain::attribute_matrix(&model, &rows, &spec).map_err(run_spec_error)?;
    let global = explain::global_from_matrix(&matrix);

    let row_docs: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(index, x)| {
            let prediction = model.predict_proba(x).expect("encoded rows are valid");
            json!({
                "index": index,
                "prediction": prediction,
                "values": matrix.row(index),
            })
        })
        .collect();

    let mut doc = json!({
        "class_labels": model.class_labels,
        "global": global.values,
        "method": spec.tag().name(),
        "neg_class": neg_class_json(&model, &spec),
        "pos_class": pos_class_json(&model, &spec),
        "rows": row_docs,
        "timestamp": report::timestamp(),
        "variables": model.variable_names(),
    });

    if let MethodSpec::Sampling { cfg, .. } = &spec {
        doc["sampling"] = json!({
            "budget": cfg.n_permutations,
            "seed": cfg.seed,
            "value_fn": match cfg.value_fn {
                ValueFunctionKind::Posterior => "posterior",
                ValueFunctionKind::LogOdds => "logodds",
            },
        });
    }
    // Signed one-vs-rest vectors accompany the combined multiclass score.
    if matches!(spec, MethodSpec::Multiclass) {
        let per_class: Vec<Value> = (0..model.n_classes())
            .map(|pos| {
                let signed = explain::attribute_matrix(
                    &model,
                    &rows,
                    &MethodSpec::Shapley {
                        pos,
                        neg: NegClass::Rest,
                    },
                )
                .expect("encoded rows are valid");
                json!({
                    "class": model.class_labels[pos],
                    "rows": signed.row_slices(),
                })
            })
            .collect();
        doc["per_class"] = json!(per_class);
    }

    report::write_json(&args.out, &doc).map_err(|e| data_err(format!("{}: {e}", args.out.display())))?;
    eprintln!(
        "explained {} rows x {} variables ({}) -> {}",
        rows.len(),
        model.d(),
        spec.tag().name(),
        args.out.display()
    );
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), AppError> {
    let model = NaiveBayesModel::load(&args.model).map_err(data_err)?;
    let rows = load_encoded(&model, &args.data, &args.missing)?;
    if rows.is_empty() {
        return Err(data_err("no rows to verify"));
    }
    let (pos, neg) = default_orientation(&model);

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let picked: Vec<usize> = if args.rows >= rows.len() {
        (0..rows.len()).collect()
    } else {
        let mut idx = sample_indices(&mut rng, rows.len(), args.rows).into_vec();
        idx.sort_unstable();
        idx
    };

    let mut max_deviation = 0.0f64;
    for &i in &picked {
        let exhaustive =
            oracle::shapley_bruteforce(&model, &rows[i], pos, neg).map_err(run_spec_error)?;
        let analytic = match neg {
            NegClass::Class(n) => explain::shapley_analytic(&model, &rows[i], pos, n),
            NegClass::Rest => explain::shapley_one_vs_rest(&model, &rows[i], pos),
        }
        .map_err(data_err)?;
        for (a, b) in exhaustive.values.iter().zip(&analytic.values) {
            max_deviation = max_deviation.max((a - b).abs());
        }
    }

    let ok = max_deviation <= args.tol;
    let doc = json!({
        "max_deviation": max_deviation,
        "rows_checked": picked.len(),
        "status": if ok { "ok" } else { "violation" },
        "tolerance": args.tol,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("report"));
    if ok {
        Ok(())
    } else {
        Err(verification(format!(
            "closed form deviates from exhaustive enumeration by {max_deviation:e} (tolerance {:e})",
            args.tol
        )))
    }
}

/// Deterministic default orientation when a command does not take a class:
/// first label against the second (two classes) or against the pooled rest.
fn default_orientation(model: &NaiveBayesModel) -> (usize, NegClass) {
    if model.n_classes() == 2 {
        (0, NegClass::Class(1))
    } else {
        (0, NegClass::Rest)
    }
}

fn compare(args: &CompareArgs) -> Result<(), AppError> {
    let model = NaiveBayesModel::load(&args.model).map_err(data_err)?;
    let rows = load_encoded(&model, &args.data, &args.missing)?;
    let resolve = |name: &str| {
        resolve_method(
            &model,
            name,
            args.class.as_deref(),
            args.value_fn,
            args.budget,
            args.seed,
        )
    };
    let spec_a = resolve(&args.a)?;
    let spec_b = resolve(&args.b)?;

    let agreement =
        metrics::agreement_report(&model, &rows, &spec_a, &spec_b).map_err(run_spec_error)?;
    let doc = json!({
        "global_kendall": agreement.global_kendall,
        "global_pearson": agreement.global_pearson,
        "method_a": agreement.method_a,
        "method_b": agreement.method_b,
        "n_rows": agreement.n_rows,
        "neg_class": neg_class_json(&model, &spec_a),
        "pos_class": pos_class_json(&model, &spec_a),
        "rowwise_kendall_mean": agreement.rowwise_kendall_mean,
        "rowwise_kendall_std": agreement.rowwise_kendall_std,
        "rowwise_skipped": agreement.rowwise_skipped,
        "timestamp": report::timestamp(),
    });
    report::write_json(&args.out, &doc).map_err(|e| data_err(format!("{}: {e}", args.out.display())))?;
    eprintln!(
        "compared {} vs {} on {} rows -> {}",
        agreement.method_a,
        agreement.method_b,
        agreement.n_rows,
        args.out.display()
    );
    Ok(())
}

fn global(args: &GlobalArgs) -> Result<(), AppError> {
    let model = NaiveBayesModel::load(&args.model).map_err(data_err)?;
    let rows = load_encoded(&model, &args.data, &args.missing)?;
    let spec = resolve_method(
        &model,
        &args.method,
        args.class.as_deref(),
        args.value_fn,
        args.budget,
        args.seed,
    )?;
    let global = explain::global_importance(&model, &rows, &spec).map_err(run_spec_error)?;
    let doc = json!({
        "global": global.values,
        "method": spec.tag().name(),
        "n_rows": rows.len(),
        "neg_class": neg_class_json(&model, &spec),
        "pos_class": pos_class_json(&model, &spec),
        "timestamp": report::timestamp(),
        "variables": model.variable_names(),
    });
    report::write_json(&args.out, &doc).map_err(|e| data_err(format!("{}: {e}", args.out.display())))?;
    Ok(())
}

fn parse_usize_list(text: &str, flag: &str) -> Result<Vec<usize>, AppError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("{flag}: {part:?} is not a positive integer")))
        })
        .collect()
}

fn bench(args: &BenchArgs) -> Result<(), AppError> {
    let d_list = parse_usize_list(&args.d, "--d")?;
    let budgets = match &args.budget {
        None => Vec::new(),
        Some(text) => parse_usize_list(text, "--budget")?,
    };

    let mut csv = String::from("method,n,d,p,budget,seconds\n");
    for &d in &d_list {
        let model = synthetic::random_model(args.seed ^ (d as u64), d, 2, args.p);
        let rows = synthetic::random_part_rows(args.seed.wrapping_add(d as u64), &model, args.n);

        for (name, spec) in [
            (
                "shapley",
                MethodSpec::Shapley {
                    pos: 1,
                    neg: NegClass::Class(0),
                },
            ),
            (
                "woe",
                MethodSpec::Woe {
                    pos: 1,
                    neg: NegClass::Class(0),
                },
            ),
        ] {
            let start = Instant::now();
            let matrix = explain::attribute_matrix(&model, &rows, &spec).map_err(data_err)?;
            let seconds = start.elapsed().as_secs_f64();
            assert_eq!(matrix.n_rows(), rows.len());
            csv.push_str(&format!("{name},{},{d},{},0,{seconds:.6}\n", args.n, args.p));
            eprintln!("{name}: n={} d={d} p={} -> {seconds:.3}s", args.n, args.p);
        }

        for &budget in &budgets {
            let subset = &rows[..rows.len().min(args.sampling_rows)];
            let spec = MethodSpec::Sampling {
                pos: 1,
                neg: NegClass::Class(0),
                cfg: SamplingConfig {
                    n_permutations: budget,
                    seed: args.seed,
                    value_fn: ValueFunctionKind::Posterior,
                    ..SamplingConfig::default()
                },
            };
            let start = Instant::now();
            let matrix = explain::attribute_matrix(&model, subset, &spec).map_err(data_err)?;
            let seconds = start.elapsed().as_secs_f64();
            assert_eq!(matrix.n_rows(), subset.len());
            csv.push_str(&format!(
                "sampling,{},{d},{},{budget},{seconds:.6}\n",
                subset.len(),
                args.p
            ));
            eprintln!(
                "sampling: n={} d={d} p={} budget={budget} -> {seconds:.3}s",
                subset.len(),
                args.p
            );
        }
    }
    report::write_text(&args.out, &csv)
        .map_err(|e| data_err(format!("{}: {e}", args.out.display())))?;
    Ok(())
}
