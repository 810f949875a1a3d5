//! Subcommands and their argument types.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tsvm_core::classifier::decide;
use tsvm_core::render::{render_svg, Overlay};
use tsvm_core::validation::{run_suite, SuiteOptions, SuiteReport, SUITES};
use tsvm_core::{
    export_regions_2d, train, Algorithm, Bounds, Label, ModelKind, MulticlassModel, Prediction,
    TrainConfig, TsvmError,
};

use crate::data::{load_dataset, load_points};
use crate::error::CliError;
use crate::model_file::ModelFile;

#[derive(Debug, Parser)]
#[command(
    name = "tsvm",
    version,
    about = "Tverberg-style multi-class SVM: train, predict, check, plot"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a hard- or soft-margin model from a CSV or JSON dataset.
    Train(TrainArgs),
    /// Classify points with a saved model and write one CSV row per point.
    Predict(PredictArgs),
    /// Run a validation suite (or `all`) and write a JSON report.
    Check(CheckArgs),
    /// Draw the class regions of a planar model as SVG plus a CSV grid.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Simple,
    Tsvm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Deterministic,
    Randomized,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset: CSV with a header and the label in the last column, or JSON.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "tsvm")]
    pub model: KindArg,
    #[arg(long, value_enum, default_value = "deterministic")]
    pub algorithm: AlgorithmArg,
    /// Seed of the randomized trainer.
    #[arg(long, env = "TSVM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Train the soft-margin variant with penalty C.
    #[arg(long, value_name = "C")]
    pub soft_margin: Option<f64>,
    /// Optimality tolerance of the closest-point solver.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Where to write the model file.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub model: PathBuf,
    /// Points: CSV with a header, `d` coordinate columns and an optional label.
    pub input: PathBuf,
    /// Output CSV; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Suite name, or `all`.
    pub suite: String,
    #[arg(long, env = "TSVM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Override the number of trials of each suite.
    #[arg(long)]
    pub trials: Option<usize>,
    /// JSON report path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub model: PathBuf,
    /// Training data to overlay; also sets the default window.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Window as `x_min,x_max,y_min,y_max`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_bounds)]
    pub bounds: Option<Bounds>,
    /// Grid cells per axis.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    /// SVG output path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// CSV grid path; defaults to the SVG path with a `.csv` extension.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [a, b, c, d] = v[..] else {
        return Err("expected four numbers x_min,x_max,y_min,y_max".into());
    };
    Bounds::new(a, b, c, d).map_err(|e| e.to_string())
}

/// Run one command. Human-readable progress goes to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => cmd_train(&a, out),
        Command::Predict(a) => cmd_predict(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Plot(a) => cmd_plot(&a, out),
    }
}

pub fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(c) = a.soft_margin.filter(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(anyhow!("--soft-margin must be positive and finite, got {c}").into());
    }
    if let Some(t) = a.tol.filter(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(anyhow!("--tol must be positive and finite, got {t}").into());
    }
    let ds = load_dataset(&a.input)?;
    let config = TrainConfig {
        kind: match a.model {
            KindArg::Simple => ModelKind::Simple,
            KindArg::Tsvm => ModelKind::Tsvm,
        },
        algorithm: match a.algorithm {
            AlgorithmArg::Deterministic => Algorithm::Deterministic,
            AlgorithmArg::Randomized => Algorithm::Randomized,
        },
        seed: a.seed,
        soft_margin: a.soft_margin,
        tol_opt: a.tol,
    };
    log::info!(
        "training {} on {} points, d = {}, k = {}",
        config.kind,
        ds.data.len(),
        ds.data.d(),
        ds.data.k()
    );
    let start = Instant::now();
    let model = train(&ds.data, &config)?;
    let elapsed = start.elapsed();
    ModelFile::from_model(&model, &ds.labels).save(&a.output)?;

    let counts: Vec<String> = ds
        .labels
        .iter()
        .zip(&model.supports)
        .map(|(l, s)| format!("{l}:{}", s.len()))
        .collect();
    writeln!(out, "lambda          {}", model.lambda())?;
    writeln!(out, "lifted margin   {}", model.lifted_margin)?;
    writeln!(
        out,
        "supports        {} ({})",
        model.support_count(),
        counts.join(" ")
    )?;
    if let Some(soft) = &model.info.soft {
        writeln!(out, "violations      {}", soft.violations)?;
    }
    writeln!(out, "training time   {:.3} s", elapsed.as_secs_f64())?;
    Ok(())
}

fn load_model(path: &Path) -> Result<(ModelFile, MulticlassModel), CliError> {
    let file = ModelFile::load(path)?;
    let model = file
        .to_model()
        .with_context(|| format!("{} is inconsistent", path.display()))?;
    Ok((file, model))
}

/// Predictions in input order. Large batches are split across threads.
pub fn predict_all(model: &MulticlassModel, rows: &[Vec<f64>]) -> Vec<Prediction> {
    let scores = model.scores();
    let lambda = model.lambda();
    let one = |x: &Vec<f64>| {
        decide(
            &scores.iter().map(|g| g.eval(x)).collect::<Vec<_>>(),
            lambda,
        )
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    if rows.len() < 4096 || threads == 1 {
        return rows.iter().map(one).collect();
    }
    let chunk = rows.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = rows
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(one).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("prediction thread"))
            .collect()
    })
}

/// `label,score_<name>…,confident,delta` for each prediction.
pub fn predictions_csv(labels: &[String], preds: &[Prediction]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if preds.is_empty() {
        return Ok(Vec::new());
    }
    let mut header = vec!["label".to_string()];
    header.extend(labels.iter().map(|l| format!("score_{l}")));
    header.extend(["confident".to_string(), "delta".to_string()]);
    let io = |e: csv::Error| CliError::Other(e.into());
    w.write_record(&header).map_err(io)?;
    for p in preds {
        let mut row = vec![match p.label {
            Label::Class(i) => labels[i].clone(),
            Label::Ambiguous => "AMBIGUOUS".to_string(),
        }];
        row.extend(p.scores.iter().map(f64::to_string));
        row.push(p.in_confident_region.to_string());
        row.push(p.in_delta.to_string());
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Other(anyhow!("{e}")))
}

pub fn cmd_predict(a: &PredictArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, model) = load_model(&a.model)?;
    let points = load_points(&a.input, model.d())?;
    let preds = predict_all(&model, &points.rows);
    let bytes = predictions_csv(&file.labels, &preds)?;
    match &a.output {
        Some(p) => {
            std::fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => out.write_all(&bytes)?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let names: Vec<&str> = match a.suite.as_str() {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(CliError::Suite(format!(
                "unknown suite {s:?}; known suites: all, {}",
                SUITES.join(", ")
            )))
        }
    };
    let opts = SuiteOptions {
        seed: a.seed,
        trials: a.trials,
    };
    let mut suites = Vec::new();
    for name in names {
        let r = run_suite(name, opts).map_err(|e| CliError::Suite(format!("{name}: {e}")))?;
        eprintln!("{}", r.summary());
        suites.push(r);
    }
    let report = CheckReport {
        seed: a.seed,
        passed: suites.iter().all(SuiteReport::ok),
        suites,
    };
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Other(e.into()))?;
    json.push('\n');
    match &a.output {
        Some(p) => {
            std::fs::write(p, json).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => out.write_all(json.as_bytes())?,
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .suites
            .iter()
            .filter(|s| !s.ok())
            .map(|s| s.suite.as_str())
            .collect();
        Err(CliError::Suite(format!(
            "failing suites: {}",
            failed.join(", ")
        )))
    }
}

pub fn cmd_plot(a: &PlotArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, model) = load_model(&a.model)?;
    if model.d() != 2 {
        return Err(CliError::Plot(format!(
            "plots need d = 2, the model has d = {}",
            model.d()
        )));
    }
    if a.resolution == 0 {
        return Err(CliError::Plot("resolution must be at least 1".into()));
    }
    // Overlay classes follow the model's label order.
    let classes: Vec<Vec<Vec<f64>>> = match &a.data {
        Some(path) => {
            let ds = load_dataset(path)?;
            if ds.data.d() != 2 {
                return Err(CliError::Plot(format!("{} is not planar", path.display())));
            }
            file.labels
                .iter()
                .map(|l| match ds.labels.iter().position(|m| m == l) {
                    Some(i) => Ok(ds.data.class(i).to_vec()),
                    None => Err(CliError::Plot(format!(
                        "label {l:?} is missing from {}",
                        path.display()
                    ))),
                })
                .collect::<Result<_, _>>()?
        }
        None => Vec::new(),
    };
    let bounds = match (a.bounds, classes.is_empty()) {
        (Some(b), _) => b,
        (None, false) => {
            let pts: Vec<&[f64]> = classes.iter().flatten().map(Vec::as_slice).collect();
            Bounds::around(&pts)
        }
        (None, true) => return Err(CliError::Plot("give --bounds or --data".into())),
    };
    let export = export_regions_2d(&model, bounds, a.resolution).map_err(|e| match e {
        TsvmError::UnsupportedDimension { .. } | TsvmError::InvalidArgument(_) => {
            CliError::Plot(e.to_string())
        }
        other => other.into(),
    })?;
    let supports: &[Vec<usize>] = if classes.is_empty() {
        &[]
    } else {
        &model.supports
    };
    let svg = render_svg(
        &export,
        Overlay {
            classes: &classes,
            supports,
            ..Overlay::default()
        },
    );
    std::fs::write(&a.output, svg)
        .with_context(|| format!("cannot write {}", a.output.display()))?;
    let grid = a
        .grid
        .clone()
        .unwrap_or_else(|| a.output.with_extension("csv"));
    std::fs::write(&grid, export.to_csv(Some(&file.labels)))
        .with_context(|| format!("cannot write {}", grid.display()))?;
    writeln!(out, "wrote {} and {}", a.output.display(), grid.display())?;
    Ok(())
}
