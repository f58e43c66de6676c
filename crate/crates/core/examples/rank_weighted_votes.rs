//! Scores the five-neighbor list 0, 1, 1, 1, 1 with each rule and prints how
//! the odd-k members of the ensemble add up.
//!
//!     cargo run --example rank_weighted_votes

use ensemble_knn::classifiers::{ensemble_predict, iinc_predict, knn_predict, weight};
use ensemble_knn::neighbors::NeighborList;

fn main() -> ensemble_knn::Result<()> {
    let list = NeighborList::from_classes(vec![0, 1, 1, 1, 1]);

    println!("rank  class  weight");
    for (i, c) in list.classes.iter().enumerate() {
        println!("{:>4}  {:>5}  {:.4}", i + 1, c, weight(i + 1));
    }

    println!("\nk  class0  class1  (ensemble running totals)");
    for k in (1..=5).step_by(2) {
        let p = ensemble_predict(&list, k, 2)?;
        println!("{k}  {:.4}  {:.4}", p.scores[0], p.scores[1]);
    }

    let one = knn_predict(&list, 1, 2)?;
    let ens = ensemble_predict(&list, 5, 2)?;
    let iinc = iinc_predict(&list, 2)?;
    println!("\n1-NN     -> class {}", one.class_index);
    println!("Ensemble -> class {}", ens.class_index);
    println!(
        "IINC     -> class {} (probabilities {:.3}, {:.3})",
        iinc.class_index, iinc.scores[0], iinc.scores[1]
    );
    Ok(())
}
