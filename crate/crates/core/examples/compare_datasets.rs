//! Evaluates the full comparison roster on every bundled dataset and prints
//! the accuracy matrix with a column-average row.
//!
//!     cargo run --release --example compare_datasets

use std::path::PathBuf;

use ensemble_knn::evaluation::{render_comparison, run_comparison, Format};
use ensemble_knn::{ExperimentConfig, Method};

fn main() -> ensemble_knn::Result<()> {
    let names = ["iris", "wine", "glass", "sonar", "haberman"];
    let paths: Vec<PathBuf> = names
        .iter()
        .map(|n| PathBuf::from(format!("data/{n}.csv")))
        .collect();

    let mut template = ExperimentConfig::new("");
    template.roster = Method::comparison_roster();
    template.base_seed = 7;

    let comparison = run_comparison(&paths, &template)?;
    for result in &comparison.datasets {
        if !result.skipped.is_empty() {
            eprintln!("{}: skipped {:?}", result.name, result.skipped);
        }
    }
    print!("{}", render_comparison(&comparison, Format::Table)?);
    Ok(())
}
