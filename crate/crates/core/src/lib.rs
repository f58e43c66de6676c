//! Parameter-free ensemble k-nearest-neighbor classification.
//!
//! The ensemble classifier runs the 1-NN, 3-NN, 5-NN, ... KNN classifiers up
//! to the largest odd `k <= sqrt(n)` and fuses their votes with a weighted sum
//! in which the neighbor at rank `i` contributes `1 / log2(1 + i)`. Because
//! only the `sqrt(n)` nearest neighbors matter, they are selected in a single
//! streaming pass over the training set through a size-bounded max-heap.
//!
//! Two baselines are provided alongside it: fixed-k majority-vote KNN and the
//! inverted-indexes-of-neighbors classifier (IINC), which scores every class
//! by the harmonic sum of the ranks its training examples occupy.
//!
//! ```
//! use ensemble_knn::classifiers::ensemble_predict;
//! use ensemble_knn::neighbors::NeighborList;
//!
//! // Classes of the five nearest neighbors, nearest first.
//! let a = NeighborList::from_classes(vec![0, 1, 1, 1, 1]);
//! let prediction = ensemble_predict(&a, 5, 2).unwrap();
//! assert_eq!(prediction.class_index, 1);
//! assert_eq!(prediction.scores[0], 3.0);
//! ```
//!
//! The [`evaluation`] module reproduces the benchmark protocol (repeated
//! seeded 70/30 splits with min-max normalization and Manhattan distance) and
//! [`cli`] wraps everything in the `ensemble-knn` binary.

pub mod classifiers;
pub mod cli;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod evaluation;
pub mod neighbors;

pub use classifiers::{classify, ClassScores, Method, Prediction};
pub use dataset::{Dataset, LabelColumn, NormalizationBounds, SplitSpec};
pub use distance::{Distance, Metric};
pub use error::{Error, Result};
pub use evaluation::{ExperimentConfig, ExperimentReport, NormalizeScope};
pub use neighbors::NeighborList;
