//! Loads a CSV dataset, splits it with a fixed seed and rescales both parts
//! with bounds fitted on the training part only.
//!
//!     cargo run --example load_normalize_split -- data/wine.csv 0.3 7

use std::env;

use ensemble_knn::dataset::{load_csv, CsvOptions};
use ensemble_knn::{dataset, SplitSpec};

fn main() -> ensemble_knn::Result<()> {
    let mut args = env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "data/wine.csv".into());
    let fraction: f64 = args
        .next()
        .map_or(0.3, |s| s.parse().expect("test fraction"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));

    let data = load_csv(&path, &CsvOptions::default())?;
    println!(
        "{path}: {} examples, {} features, classes {:?}",
        data.len(),
        data.n_features(),
        data.class_names()
    );

    let (train, test) = dataset::split(&data, &SplitSpec::new(fraction, seed))?;
    println!("train {} / test {}", train.len(), test.len());

    let bounds = dataset::fit_normalizer(&train);
    let train = dataset::normalize(&train, &bounds)?;
    let test = dataset::normalize(&test, &bounds)?;

    for (j, (lo, hi)) in bounds.bounds().iter().enumerate().take(4) {
        println!("feature {j}: train range [{lo}, {hi}]");
    }
    let (lo, hi) = test
        .examples()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let in_range = train.examples().flatten().all(|v| (0.0..=1.0).contains(v));
    println!("train values within [0, 1]: {in_range}");
    println!("test values span [{lo:.3}, {hi:.3}] (not clamped)");
    Ok(())
}
