//! Subcommand implementations.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use ufscov_core::lab::{self, gen_redundant, inject_noise, shuffle_columns, PerturbationSpec, RedundancySpec, Sidecar};
use ufscov_core::metrics::{evaluate as score, knn_eval, stepwise_eval, write_stepwise_csv, KnnParams, LabelVector};
use ufscov_core::search::{exhaustive, sbs, sfs, SelectionTrace, Strategy};
use ufscov_core::{coverage_with, load_csv, project, rescale_unit, save_csv, CsvOptions, Dataset, Error, FeatureSet, PointCloud, Result};

use crate::manifest::{sibling, RunRecord};
use crate::{CoverageArgs, EvaluateArgs, Generator, PerturbArgs, SelectArgs};

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(io_err(path))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Writes to `path`, or to standard output when there is none.
fn emit(path: Option<&Path>, contents: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => io::stdout()
            .write_all(contents)
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn write_sidecar(output: &Path, sidecar: &Sidecar) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar)? + "\n";
    write_file(&sibling(output, "meta.json"), json.as_bytes())
}

fn load(path: &Path, label: Option<&str>, record: &mut RunRecord) -> Result<Dataset> {
    record.input(path);
    let options = CsvOptions {
        label_column: label.map(str::to_string),
        ..CsvOptions::default()
    };
    load_csv(path, &options)
}

fn columns_or_all(data: &Dataset, names: &[String]) -> Result<FeatureSet> {
    if names.is_empty() {
        Ok(data.all_features())
    } else {
        data.feature_set(names)
    }
}

/// Six significant digits, but never more than six decimals, so values
/// below 0.1 lose precision rather than switching to exponent notation.
pub fn format_lambda(x: f64) -> String {
    if !x.is_finite() {
        return "undefined".into();
    }
    let magnitude = if x == 0.0 { -1 } else { x.abs().log10().floor() as i32 };
    let decimals = (5 - magnitude).clamp(0, 6) as usize;
    format!("{x:.decimals$}")
}

pub fn generate(generator: Generator, record: &mut RunRecord) -> Result<()> {
    let (cloud, output, sidecar) = match generator {
        Generator::Grid { m, dim, output } => {
            let c = lab::regular_grid(m, dim)?;
            (c, output, sidecar("grid", None, json!({ "m": m, "dim": dim })))
        }
        Generator::Halton { n, dim, output } => {
            let c = lab::halton(n, dim)?;
            (c, output, sidecar("halton", None, json!({ "n": n, "dim": dim })))
        }
        Generator::Sobol { n, dim, output } => {
            let c = lab::sobol(n, dim)?;
            (c, output, sidecar("sobol", None, json!({ "n": n, "dim": dim })))
        }
        Generator::Uniform { n, dim, seed, output } => {
            record.seeds.push(seed);
            let c = lab::uniform_random(n, dim, seed)?;
            (c, output, sidecar("uniform", Some(seed), json!({ "n": n, "dim": dim })))
        }
        Generator::Redundant { n, seed, spec, output } => {
            let mut spec = match spec {
                Some(path) => {
                    record.input(&path);
                    RedundancySpec::from_json(&read_file(&path)?)?
                }
                None => RedundancySpec::butterfly(0),
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            record.seeds.push(spec.seed);
            let data = gen_redundant(n, &spec)?;
            save_csv(&data, &output)?;
            let mut value = serde_json::to_value(&spec)?;
            value["n"] = json!(n);
            write_sidecar(&output, &sidecar("redundant", Some(spec.seed), value))?;
            record.output = Some(output);
            return Ok(());
        }
    };
    save_csv(&cloud_dataset(&cloud)?, &output)?;
    write_sidecar(&output, &sidecar)?;
    record.output = Some(output);
    Ok(())
}

fn sidecar(generator: &str, seed: Option<u64>, spec: serde_json::Value) -> Sidecar {
    Sidecar {
        generator: generator.into(),
        seed,
        spec,
    }
}

fn cloud_dataset(cloud: &PointCloud) -> Result<Dataset> {
    let names = (1..=cloud.dim()).map(|j| format!("x{j}")).collect();
    let columns = (0..cloud.dim()).map(|j| cloud.column(j)).collect();
    Dataset::new(names, columns)
}

pub fn coverage(args: CoverageArgs, record: &mut RunRecord) -> Result<()> {
    let data = load(&args.input, args.label.as_deref(), record)?;
    let subset = columns_or_all(&data, &args.columns)?;
    let data = if args.no_rescale { data } else { rescale_unit(&data).0 };
    let report = coverage_with(&project(&data, &subset)?, args.engine)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{}", format_lambda(report.lambda));
    }
    Ok(())
}

pub fn select(args: SelectArgs, record: &mut RunRecord) -> Result<()> {
    if args.table.is_some() && args.strategy != Strategy::Exhaustive {
        return Err(Error::InvalidArgument("--table needs --strategy exhaustive".into()));
    }
    let data = load(&args.input, args.label.as_deref(), record)?.without_label();
    let (data, _) = rescale_unit(&data);
    let trace = match args.strategy {
        Strategy::Sfs => sfs(&data, args.engine)?,
        Strategy::Sbs => sbs(&data, args.engine)?,
        Strategy::Exhaustive => {
            let result = exhaustive(&data, args.max_features, args.engine)?;
            if let Some(path) = &args.table {
                let mut csv = String::from("features,size,coverage\n");
                for entry in &result.table {
                    let names: Vec<&str> = entry
                        .subset
                        .indices()
                        .iter()
                        .map(|&i| data.feature_names()[i].as_str())
                        .collect();
                    let value = entry.lambda.map(|v| v.to_string()).unwrap_or_default();
                    csv.push_str(&format!("{},{},{value}\n", names.join("+"), names.len()));
                }
                write_file(path, csv.as_bytes())?;
            }
            result.to_trace(&data)
        }
    };
    if let Some(path) = &args.output {
        write_file(path, (trace.to_json()? + "\n").as_bytes())?;
        record.output = Some(path.clone());
    }
    print!("{}", render_trace(&trace));
    Ok(())
}

fn render_trace(trace: &SelectionTrace) -> String {
    let width = trace.feature_names.iter().map(String::len).max().unwrap_or(0).max(7);
    let mut out = format!("{:>4}  {:<width$}  coverage\n", "step", "feature");
    for (step, (&j, &v)) in trace.order.iter().zip(&trace.coverage_curve).enumerate() {
        let mark = if step == trace.argmin_index { "  *" } else { "" };
        out.push_str(&format!(
            "{:>4}  {:<width$}  {}{mark}\n",
            step + 1,
            trace.feature_names[j],
            format_lambda(v)
        ));
    }
    out.push_str(&format!("selected: {}\n", trace.selected_names().join(", ")));
    out
}

pub fn perturb(args: PerturbArgs, record: &mut RunRecord) -> Result<()> {
    let data = load(&args.input, args.label.as_deref(), record)?;
    let targets = data.feature_set(&args.columns)?;
    record.seeds.push(args.seed);
    let spec = match args.noise {
        Some(fraction) => PerturbationSpec::noise(fraction, targets, args.seed),
        None => PerturbationSpec::shuffle(targets, args.seed),
    };
    let out = match args.noise {
        Some(_) => inject_noise(&data, &spec)?,
        None => shuffle_columns(&data, &spec)?,
    };
    save_csv(&out, &args.output)?;
    let mut value = serde_json::to_value(&spec)?;
    value["columns"] = json!(args.columns);
    value["input"] = json!(args.input.display().to_string());
    write_sidecar(&args.output, &sidecar("perturb", Some(args.seed), value))?;
    record.output = Some(args.output);
    Ok(())
}

#[derive(Serialize)]
struct PredictionScore {
    overall_accuracy: f64,
    kappa: f64,
    n_test: usize,
}

pub fn evaluate(args: EvaluateArgs, record: &mut RunRecord) -> Result<()> {
    let data = load(&args.input, Some(&args.label), record)?;
    let truth = LabelVector::new(data.label().expect("label requested").values.clone())?;
    record.output = args.output.clone();

    if let Some(pred_path) = &args.pred {
        let column = args.pred_column.as_deref().unwrap_or(&args.label);
        let preds = load(pred_path, Some(column), record)?;
        let pred = LabelVector::new(preds.label().expect("label requested").values.clone())?;
        let r = score(&truth, &pred)?;
        let out = PredictionScore {
            overall_accuracy: r.overall_accuracy,
            kappa: r.kappa,
            n_test: r.n_test,
        };
        return emit(args.output.as_deref(), (serde_json::to_string_pretty(&out)? + "\n").as_bytes());
    }

    let params = KnnParams {
        split_fraction: args.split,
        k_neighbors: args.knn,
        repeats: args.repeats,
        seed: args.seed,
    };
    record.seeds.push(args.seed);
    let data = data.without_label();
    let data = if args.no_rescale { data } else { rescale_unit(&data).0 };

    if let Some(trace_path) = &args.trace {
        record.input(trace_path);
        let trace = SelectionTrace::from_json(&read_file(trace_path)?)?;
        let curve = stepwise_eval(&trace, &data, &truth, &params)?;
        let mut buf = Vec::new();
        write_stepwise_csv(&curve, &mut buf).map_err(io_err(Path::new("<buffer>")))?;
        return emit(args.output.as_deref(), &buf);
    }

    let subset = columns_or_all(&data, &args.columns)?;
    let summary = knn_eval(&data, &truth, &subset, &params)?;
    emit(args.output.as_deref(), (serde_json::to_string_pretty(&summary)? + "\n").as_bytes())
}
