//! Runs ten seeded repetitions on one dataset and prints the JSON report.
//!
//!     cargo run --release --example bench_report -- data/sonar.csv

use std::env;

use ensemble_knn::evaluation::{render_report, run_experiment, Format};
use ensemble_knn::{ExperimentConfig, Method};

fn main() -> ensemble_knn::Result<()> {
    let path = env::args()
        .nth(1)
        .unwrap_or_else(|| "data/sonar.csv".into());
    let mut config = ExperimentConfig::new(path);
    config.roster = vec![Method::Ensemble, Method::Iinc, Method::Knn(1)];
    config.base_seed = 7;

    let report = run_experiment(&config)?;
    print!("{}", render_report(&report, Format::Json)?);
    eprintln!(
        "ensemble run accuracies: {:?}",
        report.accuracies(Method::Ensemble)
    );
    Ok(())
}
