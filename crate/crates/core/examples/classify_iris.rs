//! Holds out 30% of iris and reports test accuracy for each classifier.
//!
//!     cargo run --release --example classify_iris

use ensemble_knn::classifiers::{classify, Method};
use ensemble_knn::dataset::{load_csv, CsvOptions};
use ensemble_knn::evaluation::accuracy;
use ensemble_knn::{dataset, Metric, SplitSpec};

fn main() -> ensemble_knn::Result<()> {
    let data = load_csv("data/iris.csv", &CsvOptions::default())?;
    let (train, test) = dataset::split(&data, &SplitSpec::new(0.3, 7))?;
    let bounds = dataset::fit_normalizer(&train);
    let train = dataset::normalize(&train, &bounds)?;
    let test = dataset::normalize(&test, &bounds)?;

    let methods = [
        Method::Knn(1),
        Method::Knn(5),
        Method::SqrtKnn,
        Method::Iinc,
        Method::Ensemble,
    ];
    for method in methods {
        let predicted = test
            .examples()
            .map(|q| classify(&train, q, method, &Metric::Manhattan).map(|p| p.class_index))
            .collect::<ensemble_knn::Result<Vec<_>>>()?;
        println!(
            "{:<11} {:.4}",
            method.label(),
            accuracy(&predicted, test.labels())?
        );
    }
    Ok(())
}
