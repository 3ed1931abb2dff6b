//! Command-line interface: featurize, train, evaluate, predict, and a
//! line-oriented streaming scorer.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or model error.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::config;
use crate::dataset;
use crate::features;
use crate::metrics;
use crate::pipeline::{self, PipelineModel};
use crate::tabu;

#[derive(Parser)]
#[command(
    name = "urlsift",
    version,
    about = "Detect and classify malicious URLs from lexical features",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract raw lexical features from a corpus CSV into a feature CSV.
    Featurize {
        /// Input corpus CSV with a URL column and a class column.
        #[arg(long)]
        data: PathBuf,
        /// Output feature CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Name of the URL column.
        #[arg(long, default_value = dataset::DEFAULT_URL_COLUMN)]
        url_column: String,
        /// Name of the class column.
        #[arg(long, default_value = dataset::DEFAULT_CLASS_COLUMN)]
        class_column: String,
    },
    /// Train the full pipeline and write the model file.
    #[command(after_help = config_help())]
    Train {
        /// Input corpus CSV.
        #[arg(long)]
        data: PathBuf,
        /// Configuration file (key = value per line); defaults apply when
        /// the flag or file is absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the trained model.
        #[arg(long)]
        model_out: PathBuf,
        /// Directory for reports, split manifests, and traces.
        #[arg(long)]
        report_out: Option<PathBuf>,
        /// Override the configured URL column name.
        #[arg(long)]
        url_column: Option<String>,
        /// Override the configured class column name.
        #[arg(long)]
        class_column: Option<String>,
    },
    /// Evaluate a trained model against a labeled corpus CSV.
    Evaluate {
        /// Trained model file.
        #[arg(long)]
        model: PathBuf,
        /// Labeled corpus CSV.
        #[arg(long)]
        data: PathBuf,
        /// Directory for the evaluation reports.
        #[arg(long)]
        report_out: PathBuf,
    },
    /// Classify a single URL.
    Predict {
        /// Trained model file.
        #[arg(long)]
        model: PathBuf,
        /// The URL to classify.
        #[arg(long)]
        url: String,
    },
    /// Score URLs line by line: stdin in, `url<TAB>class<TAB>score` out.
    Serve {
        /// Trained model file.
        #[arg(long)]
        model: PathBuf,
    },
}

fn config_help() -> String {
    config::config_keys_help()
}

/// Parse arguments and run. Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn execute(command: Command) -> Result<(), String> {
    match command {
        Command::Featurize {
            data,
            out,
            url_column,
            class_column,
        } => featurize(&data, &out, &url_column, &class_column),
        Command::Train {
            data,
            config,
            model_out,
            report_out,
            url_column,
            class_column,
        } => train(
            &data,
            config.as_deref(),
            &model_out,
            report_out.as_deref(),
            url_column,
            class_column,
        ),
        Command::Evaluate {
            model,
            data,
            report_out,
        } => evaluate(&model, &data, &report_out),
        Command::Predict { model, url } => predict(&model, &url),
        Command::Serve { model } => serve(&model),
    }
}

fn err_str(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn clean_records(
    data: &Path,
    url_column: &str,
    class_column: &str,
) -> Result<(Vec<dataset::UrlRecord>, pipeline::CleaningStats), String> {
    let loaded = dataset::load_csv_with(data, url_column, class_column).map_err(err_str)?;
    let rows_loaded = loaded.records.len();
    let deduped = dataset::dedup(loaded.records);
    let stats = pipeline::CleaningStats {
        rows_loaded,
        missing_dropped: loaded.missing_dropped,
        duplicates_dropped: deduped.duplicates_dropped,
        label_conflicts: deduped.label_conflicts,
    };
    Ok((deduped.records, stats))
}

fn featurize(data: &Path, out: &Path, url_column: &str, class_column: &str) -> Result<(), String> {
    let (records, stats) = clean_records(data, url_column, class_column)?;
    let mut text =
        String::from("url,url_length,num_dots,has_hyphen,num_special_chars,has_ip,class_label\n");
    for r in &records {
        let f = features::extract_lexical(&r.url).map_err(|e| format!("{}: {e}", r.url))?;
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            dataset::csv_field(&r.url),
            f.url_length,
            f.num_dots,
            u8::from(f.has_hyphen),
            f.num_special_chars,
            u8::from(f.has_ip),
            r.class.label()
        ));
    }
    fs::write(out, text).map_err(|e| format!("{}: {e}", out.display()))?;
    eprintln!(
        "featurized {} URLs ({} missing dropped, {} duplicates dropped)",
        records.len(),
        stats.missing_dropped,
        stats.duplicates_dropped
    );
    Ok(())
}

fn train(
    data: &Path,
    config_path: Option<&Path>,
    model_out: &Path,
    report_out: Option<&Path>,
    url_column: Option<String>,
    class_column: Option<String>,
) -> Result<(), String> {
    let mut config = config::load_config(config_path).map_err(err_str)?;
    if let Some(col) = url_column {
        config.url_column = col;
    }
    if let Some(col) = class_column {
        config.class_column = col;
    }
    config.validate().map_err(err_str)?;

    let (records, stats) = clean_records(data, &config.url_column, &config.class_column)?;
    let split = dataset::stratified_split(records, config.ratios, config.split_seed())
        .map_err(err_str)?;
    let outcome = pipeline::train_on_split(&split, &config).map_err(err_str)?;

    outcome.model.save(model_out).map_err(err_str)?;

    println!(
        "loaded {} rows ({} missing dropped, {} duplicates dropped, {} label conflicts)",
        stats.rows_loaded, stats.missing_dropped, stats.duplicates_dropped, stats.label_conflicts
    );
    println!(
        "split: train {} / validation {} / test {}",
        split.train.len(),
        split.validation.len(),
        split.test.len()
    );
    println!(
        "validation MSE: {:.6} after gradient descent, {:.6} after tabu",
        outcome.validation_mse_before_tabu, outcome.validation_mse_after_tabu
    );
    let named: Vec<(String, metrics::MetricsReport)> = outcome
        .evaluations
        .iter()
        .map(|e| (e.name.clone(), e.report))
        .collect();
    print!("{}", metrics::report_table(&named));
    println!("model written to {}", model_out.display());

    if let Some(dir) = report_out {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let all_records: Vec<dataset::UrlRecord> = split
            .train
            .iter()
            .chain(&split.validation)
            .chain(&split.test)
            .cloned()
            .collect();
        dataset::write_cleaned_csv(
            dir.join("cleaned.csv"),
            &all_records,
            &config.url_column,
            &config.class_column,
        )
        .map_err(err_str)?;
        dataset::write_split_manifests(dir, &split, &config.url_column, &config.class_column)
            .map_err(err_str)?;
        metrics::write_report_csv(dir.join("report.csv"), &named).map_err(err_str)?;
        let confusions: Vec<(String, metrics::ConfusionMatrix)> = outcome
            .evaluations
            .iter()
            .map(|e| (e.name.clone(), e.confusion))
            .collect();
        metrics::write_confusion_csv(dir.join("confusion.csv"), &confusions).map_err(err_str)?;
        fs::write(dir.join("report.txt"), metrics::report_table(&named))
            .map_err(|e| format!("{}: {e}", dir.display()))?;
        tabu::write_trace_csv(dir.join("tabu_trace.csv"), &outcome.tabu_trace)
            .map_err(err_str)?;
        println!("reports written to {}", dir.display());
    }
    Ok(())
}

fn evaluate(model_path: &Path, data: &Path, report_out: &Path) -> Result<(), String> {
    let model = PipelineModel::load(model_path).map_err(err_str)?;
    let (records, _) = clean_records(
        data,
        &model.config.url_column,
        &model.config.class_column,
    )?;
    let evaluation = pipeline::evaluate_records(&model, "evaluation", &records).map_err(err_str)?;

    fs::create_dir_all(report_out).map_err(|e| format!("{}: {e}", report_out.display()))?;
    let named = vec![(evaluation.name.clone(), evaluation.report)];
    metrics::write_report_csv(report_out.join("report.csv"), &named).map_err(err_str)?;
    metrics::write_confusion_csv(
        report_out.join("confusion.csv"),
        &[(evaluation.name.clone(), evaluation.confusion)],
    )
    .map_err(err_str)?;
    fs::write(report_out.join("report.txt"), metrics::report_table(&named))
        .map_err(|e| format!("{}: {e}", report_out.display()))?;
    print!("{}", metrics::report_table(&named));
    Ok(())
}

fn predict(model_path: &Path, url: &str) -> Result<(), String> {
    let model = PipelineModel::load(model_path).map_err(err_str)?;
    let prediction = model.predict_url(url).map_err(err_str)?;
    println!("{}", prediction.class_name);
    let scores: Vec<String> = model
        .class_names
        .iter()
        .zip(&prediction.scores)
        .map(|(name, score)| format!("{name}={score:.6}"))
        .collect();
    println!("{}", scores.join(" "));
    Ok(())
}

fn serve(model_path: &Path) -> Result<(), String> {
    let model = PipelineModel::load(model_path).map_err(err_str)?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in stdin.lock().lines() {
        let line = line.map_err(err_str)?;
        let url = line.trim();
        match model.predict_url(url) {
            Ok(p) => writeln!(out, "{url}\t{}\t{:.6}", p.class_name, p.winning_score())
                .map_err(err_str)?,
            Err(e) => {
                eprintln!("error: {url:?}: {e}");
                writeln!(out, "{url}\terror\t0.000000").map_err(err_str)?;
            }
        }
        out.flush().map_err(err_str)?;
    }
    Ok(())
}
