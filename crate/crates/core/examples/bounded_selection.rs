//! Counts distance comparisons made by the bounded heap when keeping the
//! floor(sqrt(n)) nearest of n random points, next to a full sort.
//!
//!     cargo run --release --example bounded_selection

use std::cell::Cell;

use ensemble_knn::distance::Distance;
use ensemble_knn::neighbors::{nearest_with_probe, ComparisonCounter};
use ensemble_knn::{Dataset, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> ensemble_knn::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("{:>8} {:>5} {:>12} {:>12}", "n", "m", "heap", "full sort");
    for n in [1_000, 10_000, 100_000] {
        let examples: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let train = Dataset::new(examples, labels, vec!["a".into(), "b".into()])?;
        let query = [rng.gen::<f64>(), rng.gen::<f64>()];
        let m = (n as f64).sqrt() as usize;

        let mut counter = ComparisonCounter::default();
        let near = nearest_with_probe(&train, &query, m, &Metric::Euclidean, &mut counter)?;
        assert_eq!(near.len(), m);
        assert!(counter.max_len <= m);

        let sorted = Cell::new(0u64);
        let mut d: Vec<f64> = train
            .examples()
            .map(|e| Metric::Euclidean.eval(e, &query))
            .collect();
        d.sort_by(|a, b| {
            sorted.set(sorted.get() + 1);
            a.total_cmp(b)
        });
        assert_eq!(d[m - 1], near.distances[m - 1]);

        println!(
            "{n:>8} {m:>5} {:>12} {:>12}",
            counter.comparisons,
            sorted.get()
        );
    }
    Ok(())
}
