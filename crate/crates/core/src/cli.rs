//! The `ensemble-knn` command line.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
//! data errors (unreadable or malformed files, mismatched dimensions).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classifiers::{classify, Method};
use crate::dataset::{fit_normalizer, load_csv, normalize, CsvOptions, LabelColumn};
use crate::distance::Metric;
use crate::error::{Error, Result};
use crate::evaluation::{
    prune_roster, render_comparison, render_report, run_comparison, run_on_dataset, train_size,
    ExperimentConfig, Format, NormalizeScope,
};

/// Environment variable capping worker threads (0 or unset = one per core).
pub const THREADS_ENV: &str = "ENSEMBLE_KNN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "ensemble-knn",
    version,
    about = "Ensemble KNN classification and benchmarking",
    long_about = "Classify queries and benchmark the ensemble KNN classifier against \
                  fixed-k KNN and IINC baselines.\n\n\
                  Set ENSEMBLE_KNN_THREADS to cap worker threads (0 = one per core)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one or more query vectors against a training CSV.
    Predict(PredictArgs),
    /// Evaluate classifiers on one dataset over repeated seeded splits.
    Bench(BenchArgs),
    /// Evaluate the eleven-classifier comparison roster on several datasets.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Treat the first CSV row as data rather than a header.
    #[arg(long)]
    no_header: bool,

    /// Label column: 0-based index, header name, or "last".
    #[arg(long, default_value = "last", value_name = "COLUMN")]
    label_column: LabelColumn,

    /// Distance metric: manhattan or euclidean.
    #[arg(long, default_value = "manhattan")]
    metric: Metric,

    /// Fit normalization bounds on the training split ("train") or on the
    /// whole dataset ("all").
    #[arg(long, default_value = "train", value_name = "SCOPE")]
    normalize_scope: NormalizeScope,
}

impl CsvArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            has_header: !self.no_header,
            label_column: self.label_column.clone(),
        }
    }
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Training CSV.
    #[arg(long, value_name = "CSV")]
    train: PathBuf,

    /// Comma-separated feature vector, or a CSV file of feature-only rows.
    #[arg(long, value_name = "VECTOR|CSV")]
    query: String,

    /// knn:<k>, sqrt-knn, iinc or ensemble.
    #[arg(long, default_value = "ensemble")]
    classifier: Method,

    #[command(flatten)]
    csv: CsvArgs,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Fraction of each dataset held out for testing.
    #[arg(long, default_value_t = 0.30, value_name = "FRACTION")]
    test_fraction: f64,

    /// Number of seeded splits.
    #[arg(long, default_value_t = 10)]
    runs: usize,

    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output format: table or json.
    #[arg(long, default_value = "table")]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(flatten)]
    csv: CsvArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Dataset CSV.
    #[arg(long, value_name = "CSV")]
    train: PathBuf,

    /// Classifier to evaluate; repeat for several (default: ensemble).
    #[arg(long)]
    classifier: Vec<Method>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Dataset CSVs, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', required = true, value_name = "CSV")]
    datasets: Vec<PathBuf>,

    #[command(flatten)]
    run: RunArgs,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().ansi().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };

    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };

    match pool.install(|| dispatch(cli.command, out, err)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                1
            } else {
                2
            }
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::InvalidConfig(format!("{THREADS_ENV}={v:?} is not a thread count"))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start thread pool: {e}")))
}

fn dispatch(
    command: Command,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    match command {
        Command::Predict(args) => predict(args, out),
        Command::Bench(args) => bench(args, out, err),
        Command::Compare(args) => compare(args, out, err),
    }
}

fn predict(args: PredictArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let train = load_csv(&args.train, &args.csv.options())?;
    let queries = parse_queries(&args.query, args.csv.no_header)?;
    if !args.classifier.fits(train.len()) {
        return Err(Error::InvalidConfig(format!(
            "classifier {} needs more than the {} training examples available",
            args.classifier,
            train.len()
        )));
    }
    // a single training set has no split, so both scopes fit on it
    let bounds = fit_normalizer(&train);
    let train = normalize(&train, &bounds)?;
    for query in queries {
        let query = bounds.apply(&query)?;
        let prediction = classify(&train, &query, args.classifier, &args.csv.metric)?;
        let names = train.class_names();
        let scores: Vec<String> = names
            .iter()
            .zip(prediction.scores.iter())
            .map(|(name, s)| format!("{name}={s:.6}"))
            .collect();
        writeln!(
            out,
            "{}\t{}",
            names[prediction.class_index],
            scores.join(" ")
        )
        .map_err(|e| io_error(Path::new("<stdout>"), e))?;
    }
    Ok(())
}

fn parse_queries(query: &str, no_header: bool) -> Result<Vec<Vec<f64>>> {
    let path = Path::new(query);
    if path.is_file() {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(!no_header)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Parse {
                row: 0,
                message: format!("{}: {e}", path.display()),
            })?;
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse {
                row: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let row = record.position().map_or(0, |p| p.line() as usize);
            rows.push(parse_vector(record.iter(), row)?);
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(rows)
    } else {
        Ok(vec![parse_vector(query.split(','), 1)?])
    }
}

fn parse_vector<'a>(cells: impl Iterator<Item = &'a str>, row: usize) -> Result<Vec<f64>> {
    cells
        .map(|c| {
            let c = c.trim();
            c.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    message: format!("query value {c:?} is not a finite number"),
                })
        })
        .collect()
}

fn experiment_template(dataset: PathBuf, roster: Vec<Method>, run: &RunArgs) -> ExperimentConfig {
    ExperimentConfig {
        dataset,
        has_header: !run.csv.no_header,
        label_column: run.csv.label_column.clone(),
        test_fraction: run.test_fraction,
        repetitions: run.runs,
        base_seed: run.seed,
        metric: run.csv.metric,
        roster,
        normalize_scope: run.csv.normalize_scope,
    }
}

fn bench(
    args: BenchArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let roster = if args.classifier.is_empty() {
        vec![Method::Ensemble]
    } else {
        args.classifier
    };
    let mut config = experiment_template(args.train, roster, &args.run);
    config.validate()?;
    let data = load_csv(&config.dataset, &config.csv_options())?;
    let n_train = train_size(data.len(), config.test_fraction)?;
    let (kept, skipped) = prune_roster(&config.roster, n_train);
    for m in &skipped {
        let _ = writeln!(
            err,
            "warning: skipping {m}: only {n_train} training examples available"
        );
    }
    if kept.is_empty() {
        return Err(Error::InvalidConfig(
            "no classifier of the roster fits the dataset".into(),
        ));
    }
    config.roster = kept;
    let report = run_on_dataset(&data, &config)?;
    emit(
        &render_report(&report, args.run.format)?,
        args.run.out.as_deref(),
        out,
    )
}

fn compare(
    args: CompareArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let template = experiment_template(
        args.datasets.first().cloned().unwrap_or_default(),
        Method::comparison_roster(),
        &args.run,
    );
    let comparison = run_comparison(&args.datasets, &template)?;
    for d in &comparison.datasets {
        for m in &d.skipped {
            let _ = writeln!(
                err,
                "warning: skipping {m} on {}: training partition too small",
                d.name
            );
        }
    }
    emit(
        &render_comparison(&comparison, args.run.format)?,
        args.run.out.as_deref(),
        out,
    )
}

fn emit(text: &str, path: Option<&Path>, out: &mut (dyn Write + Send)) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_owned(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ensemble-knn").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("predict"));
        let (code, out, _) = run_args(&["bench", "--help"]);
        assert_eq!(code, 0);
        for flag in [
            "--train",
            "--classifier",
            "--metric",
            "--test-fraction",
            "--runs",
            "--seed",
            "--normalize-scope",
            "--format",
            "--out",
        ] {
            assert!(out.contains(flag), "{flag} missing from bench help");
        }
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["bench", "--bogus"]).0, 1);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(
            run_args(&["bench", "--train", "x.csv", "--metric", "cosine"]).0,
            1
        );
        assert_eq!(
            run_args(&["bench", "--train", "x.csv", "--classifier", "knn:0"]).0,
            1
        );
        assert_eq!(run_args(&[]).0, 1);
    }

    #[test]
    fn missing_file_exits_two() {
        let (code, _, err) = run_args(&["bench", "--train", "missing.csv"]);
        assert_eq!(code, 2);
        assert!(err.contains("missing.csv"), "{err}");
    }

    #[test]
    fn inline_query_parsing() {
        assert_eq!(
            parse_queries("5.1, 3.5,1.4,0.2", false).unwrap(),
            vec![vec![5.1, 3.5, 1.4, 0.2]]
        );
        assert!(parse_queries("1,abc", false).is_err());
        assert!(parse_queries("1,inf", false).is_err());
    }
}
