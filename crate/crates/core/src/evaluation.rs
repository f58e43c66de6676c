//! Repeated seeded hold-out evaluation.
//!
//! Run `r` splits the dataset with seed `base_seed + r`, min-max normalizes
//! it, and scores every classifier of the roster on the same test partition.
//! Runs and test examples are evaluated in parallel on the current rayon
//! pool; results are always assembled in `(run, classifier)` order, so a
//! report depends only on its configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{classify, Method};
use crate::dataset::{
    fit_normalizer, load_csv, normalize, split, CsvOptions, Dataset, LabelColumn, SplitSpec,
};
use crate::distance::Metric;
use crate::error::{Error, Result};

/// Which examples the normalization bounds are fitted on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizeScope {
    /// Training partition only; test values may leave `[0, 1]`.
    #[default]
    Train,
    /// The full dataset before splitting.
    All,
}

impl FromStr for NormalizeScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(NormalizeScope::Train),
            "all" => Ok(NormalizeScope::All),
            other => Err(Error::InvalidConfig(format!(
                "unknown normalize scope {other:?} (expected train or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub has_header: bool,
    pub label_column: LabelColumn,
    pub test_fraction: f64,
    pub repetitions: usize,
    pub base_seed: u64,
    pub metric: Metric,
    pub roster: Vec<Method>,
    pub normalize_scope: NormalizeScope,
}

impl ExperimentConfig {
    /// Defaults: 30% test, 10 runs, seed 0, Manhattan distance, training-only
    /// normalization and the ensemble classifier alone.
    pub fn new(dataset: impl Into<PathBuf>) -> Self {
        Self {
            dataset: dataset.into(),
            has_header: true,
            label_column: LabelColumn::Last,
            test_fraction: 0.30,
            repetitions: 10,
            base_seed: 0,
            metric: Metric::Manhattan,
            roster: vec![Method::Ensemble],
            normalize_scope: NormalizeScope::Train,
        }
    }

    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            has_header: self.has_header,
            label_column: self.label_column.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test fraction {} is not in (0, 1)",
                self.test_fraction
            )));
        }
        if self.roster.is_empty() {
            return Err(Error::InvalidConfig("classifier roster is empty".into()));
        }
        for (i, m) in self.roster.iter().enumerate() {
            if self.roster[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("classifier {m} listed twice")));
            }
        }
        Ok(())
    }

    /// Seed of run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Accuracy per classifier, keyed by the classifier selector string.
    pub per_classifier: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub means: IndexMap<String, f64>,
}

impl ExperimentReport {
    pub fn mean(&self, method: Method) -> Option<f64> {
        self.means.get(&method.to_string()).copied()
    }

    pub fn accuracies(&self, method: Method) -> Vec<f64> {
        let key = method.to_string();
        self.runs
            .iter()
            .filter_map(|r| r.per_classifier.get(&key).copied())
            .collect()
    }
}

/// Fraction of positions where `predictions` and `truth` agree.
pub fn accuracy(predictions: &[usize], truth: &[usize]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: predictions.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let correct = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    Ok(correct as f64 / truth.len() as f64)
}

/// Training-partition size for a dataset of `n` examples.
pub fn train_size(n: usize, test_fraction: f64) -> Result<usize> {
    Ok(n - SplitSpec::new(test_fraction, 0).test_size(n)?)
}

/// Splits `roster` into the classifiers that can run on `n_train` training
/// examples and those that cannot (fixed-k KNN with `k > n_train`).
pub fn prune_roster(roster: &[Method], n_train: usize) -> (Vec<Method>, Vec<Method>) {
    roster.iter().partition(|m| m.fits(n_train))
}

/// Loads `config.dataset` and evaluates it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let data = load_csv(&config.dataset, &config.csv_options())?;
    run_on_dataset(&data, config)
}

/// Evaluates an already-loaded dataset; `config.dataset` is only echoed.
pub fn run_on_dataset(data: &Dataset, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let n_train = train_size(data.len(), config.test_fraction)?;
    if let Some(m) = config.roster.iter().find(|m| !m.fits(n_train)) {
        return Err(Error::InvalidConfig(format!(
            "classifier {m} needs more than the {n_train} training examples available"
        )));
    }

    let prepared = match config.normalize_scope {
        NormalizeScope::All => Some(normalize(data, &fit_normalizer(data))?),
        NormalizeScope::Train => None,
    };
    let source = prepared.as_ref().unwrap_or(data);

    let runs = (0..config.repetitions)
        .into_par_iter()
        .map(|run| {
            let seed = config.run_seed(run);
            evaluate_run(source, config, seed).map_err(|e| Error::Run {
                run,
                seed,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let means = config
        .roster
        .iter()
        .map(|m| {
            let key = m.to_string();
            let sum: f64 = runs.iter().map(|r| r.per_classifier[&key]).sum();
            (key, sum / runs.len() as f64)
        })
        .collect();

    Ok(ExperimentReport {
        config: config.clone(),
        runs,
        means,
    })
}

fn evaluate_run(data: &Dataset, config: &ExperimentConfig, seed: u64) -> Result<RunRecord> {
    let (train, test) = split(data, &SplitSpec::new(config.test_fraction, seed))?;
    let (train, test) = match config.normalize_scope {
        NormalizeScope::Train => {
            let bounds = fit_normalizer(&train);
            (normalize(&train, &bounds)?, normalize(&test, &bounds)?)
        }
        NormalizeScope::All => (train, test),
    };

    let mut per_classifier = IndexMap::with_capacity(config.roster.len());
    for &method in &config.roster {
        let predictions = (0..test.len())
            .into_par_iter()
            .map(|i| {
                classify(&train, test.example(i), method, &config.metric).map(|p| p.class_index)
            })
            .collect::<Result<Vec<_>>>()?;
        per_classifier.insert(method.to_string(), accuracy(&predictions, test.labels())?);
    }
    Ok(RunRecord {
        seed,
        per_classifier,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Table,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown format {other:?} (expected table or json)"
            ))),
        }
    }
}

/// Rounds half-up to two decimals for display. A small epsilon absorbs the
/// binary representation error of values such as 0.955.
pub fn format_accuracy(value: f64) -> String {
    let cents = (value * 100.0 + 0.5 + 1e-9).floor();
    format!("{:.2}", cents / 100.0)
}

pub fn render_report(report: &ExperimentReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "dataset: {}", dataset_name(&report.config.dataset));
            let _ = writeln!(
                out,
                "{} runs, test fraction {}, {} distance, base seed {}",
                report.runs.len(),
                report.config.test_fraction,
                report.config.metric,
                report.config.base_seed
            );
            let width = report
                .config
                .roster
                .iter()
                .map(|m| m.label().len())
                .max()
                .unwrap_or(0)
                .max("classifier".len());
            let _ = writeln!(out, "{:<width$}  accuracy", "classifier");
            for m in &report.config.roster {
                if let Some(mean) = report.mean(*m) {
                    let _ = writeln!(out, "{:<width$}  {}", m.label(), format_accuracy(mean));
                }
            }
            Ok(out)
        }
    }
}

/// File stem of a dataset path, used as a row name.
pub fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResult {
    pub name: String,
    /// Roster entries that could not run on this dataset.
    pub skipped: Vec<Method>,
    pub report: ExperimentReport,
}

/// Several datasets evaluated against one roster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub roster: Vec<Method>,
    pub datasets: Vec<DatasetResult>,
}

impl Comparison {
    /// Mean accuracy of `method` on dataset `row`, if it ran there.
    pub fn cell(&self, row: usize, method: Method) -> Option<f64> {
        self.datasets[row].report.mean(method)
    }

    /// Average of a column over the datasets where the method ran.
    pub fn column_average(&self, method: Method) -> Option<f64> {
        let values: Vec<f64> = (0..self.datasets.len())
            .filter_map(|row| self.cell(row, method))
            .collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Runs `template` (roster included) on every dataset in `paths`, skipping
/// fixed-k baselines too large for a dataset's training partition.
pub fn run_comparison(paths: &[PathBuf], template: &ExperimentConfig) -> Result<Comparison> {
    template.validate()?;
    let mut datasets = Vec::with_capacity(paths.len());
    for path in paths {
        let mut config = template.clone();
        config.dataset = path.clone();
        let data = load_csv(path, &config.csv_options())?;
        let n_train = train_size(data.len(), config.test_fraction)?;
        let (kept, skipped) = prune_roster(&template.roster, n_train);
        if kept.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no classifier of the roster fits {}",
                path.display()
            )));
        }
        config.roster = kept;
        let report = run_on_dataset(&data, &config)?;
        datasets.push(DatasetResult {
            name: dataset_name(path),
            skipped,
            report,
        });
    }
    Ok(Comparison {
        roster: template.roster.clone(),
        datasets,
    })
}

pub fn render_comparison(comparison: &Comparison, format: Format) -> Result<String> {
    if format == Format::Json {
        return Ok(serde_json::to_string_pretty(comparison)? + "\n");
    }
    let name_width = comparison
        .datasets
        .iter()
        .map(|d| d.name.len())
        .chain(["Data set".len(), "Average".len()])
        .max()
        .unwrap_or(0);
    let labels: Vec<String> = comparison.roster.iter().map(Method::label).collect();
    let cell_width = |i: usize| labels[i].len().max(4);

    let mut out = String::new();
    let _ = write!(out, "{:<name_width$}", "Data set");
    for (i, label) in labels.iter().enumerate() {
        let _ = write!(out, "  {:>w$}", label, w = cell_width(i));
    }
    out.push('\n');

    let mut row = |name: &str, cells: Vec<Option<f64>>| {
        let _ = write!(out, "{name:<name_width$}");
        for (i, cell) in cells.into_iter().enumerate() {
            let text = cell.map_or_else(|| "-".to_string(), format_accuracy);
            let _ = write!(out, "  {:>w$}", text, w = cell_width(i));
        }
        out.push('\n');
    };
    for (r, d) in comparison.datasets.iter().enumerate() {
        row(
            &d.name,
            comparison
                .roster
                .iter()
                .map(|&m| comparison.cell(r, m))
                .collect(),
        );
    }
    if comparison.datasets.len() > 1 {
        row(
            "Average",
            comparison
                .roster
                .iter()
                .map(|&m| comparison.column_average(m))
                .collect(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_dataset() -> Dataset {
        // every example appears twice, so with a 50% split most test points
        // have an exact duplicate in training; use distinct clusters so 1-NN is
        // right even when the duplicate lands in the test set too
        let mut examples = Vec::new();
        let mut labels = Vec::new();
        for c in 0..3 {
            for j in 0..10 {
                let x = vec![c as f64 * 100.0 + j as f64 * 0.1, c as f64 * 50.0];
                examples.push(x.clone());
                examples.push(x);
                labels.push(format!("c{c}"));
                labels.push(format!("c{c}"));
            }
        }
        Dataset::from_labeled(examples, &labels).unwrap()
    }

    fn config(roster: Vec<Method>, reps: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new("grid.csv");
        c.roster = roster;
        c.repetitions = reps;
        c.base_seed = 11;
        c
    }

    #[test]
    fn accuracy_values() {
        assert_eq!(accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 0], &[0, 1, 1]).unwrap(), 2.0 / 3.0);
        assert_eq!(accuracy(&[1, 1], &[0, 0]).unwrap(), 0.0);
        assert!(accuracy(&[0], &[0, 1]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn duplicated_points_give_perfect_one_nn() {
        let report = run_on_dataset(&grid_dataset(), &config(vec![Method::Knn(1)], 4)).unwrap();
        assert_eq!(report.runs.len(), 4);
        for run in &report.runs {
            assert_eq!(run.per_classifier["knn:1"], 1.0);
        }
        assert_eq!(report.mean(Method::Knn(1)), Some(1.0));
    }

    #[test]
    fn run_seeds_are_stable_across_repetition_counts() {
        let roster = vec![Method::Knn(3), Method::Ensemble, Method::Iinc];
        let one = run_on_dataset(&grid_dataset(), &config(roster.clone(), 1)).unwrap();
        let two = run_on_dataset(&grid_dataset(), &config(roster, 2)).unwrap();
        assert_eq!(one.runs[0], two.runs[0]);
        assert_eq!(two.runs[1].seed, 12);
    }

    #[test]
    fn means_are_run_averages() {
        let roster = vec![Method::Knn(1), Method::Knn(5), Method::Ensemble];
        let report = run_on_dataset(&grid_dataset(), &config(roster.clone(), 5)).unwrap();
        for m in roster {
            let runs = report.accuracies(m);
            let mean = runs.iter().sum::<f64>() / runs.len() as f64;
            assert!((report.mean(m).unwrap() - mean).abs() < 1e-12);
            assert!(runs.iter().all(|a| (0.0..=1.0).contains(a)));
        }
    }

    #[test]
    fn config_validation() {
        assert!(config(vec![], 1).validate().is_err());
        assert!(config(vec![Method::Iinc], 0).validate().is_err());
        assert!(config(vec![Method::Iinc, Method::Iinc], 1)
            .validate()
            .is_err());
        let mut c = config(vec![Method::Iinc], 1);
        c.test_fraction = 1.0;
        assert!(c.validate().is_err());
        let err = run_on_dataset(&grid_dataset(), &config(vec![], 1)).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn oversized_k_is_rejected() {
        let err = run_on_dataset(&grid_dataset(), &config(vec![Method::Knn(60)], 1)).unwrap_err();
        assert!(err.is_config(), "{err}");
        let (kept, skipped) = prune_roster(&Method::comparison_roster(), 42);
        assert_eq!(skipped, vec![Method::Knn(45), Method::Knn(60)]);
        assert_eq!(kept.len(), 9);
    }

    #[test]
    fn normalize_scope_all_runs() {
        let mut c = config(vec![Method::Ensemble], 2);
        c.normalize_scope = NormalizeScope::All;
        let report = run_on_dataset(&grid_dataset(), &c).unwrap();
        assert_eq!(report.runs.len(), 2);
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(format_accuracy(0.955), "0.96");
        assert_eq!(format_accuracy(0.954), "0.95");
        assert_eq!(format_accuracy(1.0), "1.00");
        assert_eq!(format_accuracy(0.0), "0.00");
        assert_eq!(format_accuracy(2.0 / 3.0), "0.67");
        assert_eq!(format_accuracy(0.845), "0.85");
    }

    #[test]
    fn table_and_json_rendering() {
        let report = run_on_dataset(
            &grid_dataset(),
            &config(vec![Method::Knn(1), Method::Ensemble], 2),
        )
        .unwrap();
        let table = render_report(&report, Format::Table).unwrap();
        assert!(table.contains("1-NN"));
        assert!(table.contains("1.00"));
        let json = render_report(&report, Format::Json).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(render_report(&back, Format::Json).unwrap(), json);
    }
}
