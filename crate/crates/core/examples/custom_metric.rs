//! Plugs a user-defined distance into neighbor search and classification.
//!
//!     cargo run --example custom_metric

use ensemble_knn::classifiers::{classify, Method};
use ensemble_knn::dataset::{load_csv, CsvOptions};
use ensemble_knn::distance::Distance;
use ensemble_knn::neighbors::nearest;
use ensemble_knn::{dataset, Metric};

/// L-infinity distance.
struct Chebyshev;

impl Distance for Chebyshev {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

fn main() -> ensemble_knn::Result<()> {
    let data = load_csv("data/iris.csv", &CsvOptions::default())?;
    let bounds = dataset::fit_normalizer(&data);
    let train = dataset::normalize(&data, &bounds)?;
    let query = bounds.apply(&[6.0, 2.9, 4.5, 1.5])?;

    let metrics: [(&str, &dyn Distance); 3] = [
        ("manhattan", &Metric::Manhattan),
        ("euclidean", &Metric::Euclidean),
        ("chebyshev", &Chebyshev),
    ];
    for (name, metric) in metrics {
        let near = nearest(&train, &query, 5, metric)?;
        let p = classify(&train, &query, Method::Ensemble, metric)?;
        println!(
            "{name:<10} nearest rows {:?} -> {}",
            near.indices,
            train.class_names()[p.class_index]
        );
    }
    Ok(())
}
