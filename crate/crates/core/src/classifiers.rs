//! Fixed-k majority-vote KNN, the inverted-indexes-of-neighbors classifier
//! (IINC) and the ensemble weighted-sum classifier.
//!
//! All three turn a ranked [`NeighborList`] into per-class scores and take
//! the argmax:
//!
//! * KNN counts the classes of the first `k` neighbors.
//! * IINC gives the neighbor at rank `i` a score of `1/i`, sums per class over
//!   the whole training set and divides by the harmonic number `H_n`, which
//!   makes the scores class probabilities.
//! * The ensemble runs the KNN classifiers for every odd `k` up to `kmax` and
//!   adds `w(i) = 1/log2(1 + i)` to the class of each neighbor `i <= k` that
//!   votes in each of them.
//!
//! KNN and the ensemble break score ties in favor of the tied class whose
//! nearest example is closest to the query, then the lowest class index.
//! IINC breaks ties by lowest class index.

use std::fmt;
use std::ops::{Deref, Index};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::neighbors::{kmax_for, nearest, rank_all, sqrt_k, NeighborList};

/// Per-class score accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores(Vec<f64>);

impl ClassScores {
    pub fn zeros(n_classes: usize) -> Self {
        Self(vec![0.0; n_classes])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    fn add(&mut self, class: usize, amount: f64) -> Result<()> {
        let n_classes = self.0.len();
        let slot = self.0.get_mut(class).ok_or_else(|| {
            Error::InvalidDataset(format!(
                "neighbor class {class} out of range for {n_classes} classes"
            ))
        })?;
        *slot += amount;
        Ok(())
    }

    fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest class index attaining the maximum score.
    pub fn argmax(&self) -> usize {
        let max = self.max();
        self.0.iter().position(|&s| s == max).unwrap_or(0)
    }

    /// Maximum-score class; among tied classes the one appearing first in
    /// `ranked_classes`, then the lowest index.
    pub fn argmax_nearest(&self, ranked_classes: &[usize]) -> usize {
        let max = self.max();
        ranked_classes
            .iter()
            .copied()
            .find(|&c| self.0.get(c) == Some(&max))
            .unwrap_or_else(|| self.argmax())
    }
}

impl Deref for ClassScores {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for ClassScores {
    type Output = f64;

    fn index(&self, class: usize) -> &f64 {
        &self.0[class]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class_index: usize,
    pub scores: ClassScores,
}

/// Vote weight of the neighbor at 1-based `rank`: `1 / log2(1 + rank)`.
pub fn weight(rank: usize) -> f64 {
    debug_assert!(rank >= 1);
    1.0 / (1.0 + rank as f64).log2()
}

/// Majority vote over the first `k` neighbors.
pub fn knn_predict(neighbors: &NeighborList, k: usize, n_classes: usize) -> Result<Prediction> {
    if k == 0 || k > neighbors.len() {
        return Err(Error::NeighborCount {
            requested: k,
            available: neighbors.len(),
        });
    }
    let voters = &neighbors.classes[..k];
    let mut scores = ClassScores::zeros(n_classes);
    for &c in voters {
        scores.add(c, 1.0)?;
    }
    Ok(Prediction {
        class_index: scores.argmax_nearest(voters),
        scores,
    })
}

/// IINC over a ranking of the entire training set. Scores are
/// `S_c / H_n` where `S_c` sums `1/i` over the ranks `i` held by class `c`.
pub fn iinc_predict(ranked: &NeighborList, n_classes: usize) -> Result<Prediction> {
    if ranked.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut scores = ClassScores::zeros(n_classes);
    let mut harmonic = 0.0;
    for (i, &c) in ranked.classes.iter().enumerate() {
        let inv = 1.0 / (i + 1) as f64;
        scores.add(c, inv)?;
        harmonic += inv;
    }
    for s in &mut scores.0 {
        *s /= harmonic;
    }
    Ok(Prediction {
        class_index: scores.argmax(),
        scores,
    })
}

/// Weighted-sum fusion of the 1-NN, 3-NN, ..., `kmax`-NN classifiers.
pub fn ensemble_predict(
    neighbors: &NeighborList,
    kmax: usize,
    n_classes: usize,
) -> Result<Prediction> {
    if kmax.is_multiple_of(2) {
        return Err(Error::EvenKmax(kmax));
    }
    if kmax > neighbors.len() {
        return Err(Error::NeighborCount {
            requested: kmax,
            available: neighbors.len(),
        });
    }
    let a = &neighbors.classes[..kmax];
    let mut scores = ClassScores::zeros(n_classes);
    for k in (1..=kmax).step_by(2) {
        for (i, &c) in a[..k].iter().enumerate() {
            scores.add(c, weight(i + 1))?;
        }
    }
    Ok(Prediction {
        class_index: scores.argmax_nearest(a),
        scores,
    })
}

/// Classifier selector. Parses from and displays as `knn:<k>`, `sqrt-knn`,
/// `iinc` or `ensemble`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Majority vote of the `k` nearest neighbors.
    Knn(usize),
    /// KNN with `k = floor(sqrt(n_train))`.
    SqrtKnn,
    Iinc,
    Ensemble,
}

impl Method {
    /// The eleven classifiers of the benchmark comparison table, in column
    /// order.
    pub fn comparison_roster() -> Vec<Method> {
        let mut roster: Vec<Method> = [1, 3, 5, 7, 9].into_iter().map(Method::Knn).collect();
        roster.push(Method::SqrtKnn);
        roster.extend([30, 45, 60].into_iter().map(Method::Knn));
        roster.push(Method::Iinc);
        roster.push(Method::Ensemble);
        roster
    }

    /// Column heading for tables.
    pub fn label(&self) -> String {
        match self {
            Method::Knn(k) => format!("{k}-NN"),
            Method::SqrtKnn => "sqrt(n)-NN".into(),
            Method::Iinc => "IINC".into(),
            Method::Ensemble => "Ensemble".into(),
        }
    }

    /// Whether the method can run against `n_train` training examples.
    pub fn fits(&self, n_train: usize) -> bool {
        match self {
            Method::Knn(k) => *k >= 1 && *k <= n_train,
            _ => n_train >= 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Knn(k) => write!(f, "knn:{k}"),
            Method::SqrtKnn => f.write_str("sqrt-knn"),
            Method::Iinc => f.write_str("iinc"),
            Method::Ensemble => f.write_str("ensemble"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "sqrt-knn" => Ok(Method::SqrtKnn),
            "iinc" => Ok(Method::Iinc),
            "ensemble" => Ok(Method::Ensemble),
            _ => {
                let k = s
                    .strip_prefix("knn:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "unknown classifier {s:?} (expected knn:<k>, sqrt-knn, iinc or ensemble)"
                        ))
                    })?;
                Ok(Method::Knn(k))
            }
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Classifies one query against `train`.
pub fn classify<D: Distance + ?Sized>(
    train: &Dataset,
    query: &[f64],
    method: Method,
    metric: &D,
) -> Result<Prediction> {
    let n = train.len();
    let n_classes = train.n_classes();
    match method {
        Method::Knn(k) => knn_predict(&nearest(train, query, k, metric)?, k, n_classes),
        Method::SqrtKnn => {
            let k = sqrt_k(n);
            knn_predict(&nearest(train, query, k, metric)?, k, n_classes)
        }
        Method::Iinc => iinc_predict(&rank_all(train, query, metric)?, n_classes),
        Method::Ensemble => {
            let kmax = kmax_for(n);
            ensemble_predict(&nearest(train, query, kmax, metric)?, kmax, n_classes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::Metric;
    use proptest::prelude::*;

    fn a(classes: &[usize]) -> NeighborList {
        NeighborList::from_classes(classes.to_vec())
    }

    #[test]
    fn weights() {
        assert_eq!(weight(1), 1.0);
        assert!((weight(2) - 0.6309).abs() < 5e-5);
        assert_eq!(weight(3), 0.5);
        for r in 1..200 {
            assert!(weight(r + 1) < weight(r));
        }
    }

    #[test]
    fn knn_votes() {
        let list = a(&[0, 1, 1, 1, 1]);
        assert_eq!(knn_predict(&list, 1, 2).unwrap().class_index, 0);
        let five = knn_predict(&list, 5, 2).unwrap();
        assert_eq!(five.class_index, 1);
        assert_eq!(&*five.scores, &[1.0, 4.0]);
        assert_eq!(knn_predict(&a(&[0, 1]), 2, 2).unwrap().class_index, 0);
        assert_eq!(knn_predict(&a(&[1, 0]), 2, 2).unwrap().class_index, 1);
        assert!(matches!(
            knn_predict(&list, 6, 2),
            Err(Error::NeighborCount { .. })
        ));
        assert!(knn_predict(&list, 0, 2).is_err());
    }

    #[test]
    fn knn_tie_prefers_nearest_tied_class() {
        // classes 1 and 2 tie with 2 votes; class 2 owns the nearest neighbor
        let p = knn_predict(&a(&[2, 1, 0, 1, 2]), 5, 3).unwrap();
        assert_eq!(p.class_index, 2);
    }

    #[test]
    fn iinc_two_points() {
        let p = iinc_predict(&a(&[0, 1]), 2).unwrap();
        assert!((p.scores[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.scores[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.class_index, 0);
    }

    #[test]
    fn iinc_single_class() {
        let p = iinc_predict(&a(&[1, 1, 1, 1]), 3).unwrap();
        assert_eq!(&*p.scores, &[0.0, 1.0, 0.0]);
        assert_eq!(p.class_index, 1);
        assert!(matches!(iinc_predict(&a(&[]), 2), Err(Error::EmptyDataset)));
    }

    #[test]
    fn iinc_tie_goes_to_lowest_class() {
        // harmonic partial sums rarely tie exactly, so exercise the rule directly
        let scores = ClassScores(vec![0.25, 0.5, 0.5]);
        assert_eq!(scores.argmax(), 1);
        assert_eq!(scores.argmax_nearest(&[2, 1]), 2);
    }

    #[test]
    fn ensemble_worked_example() {
        let p = ensemble_predict(&a(&[0, 1, 1, 1, 1]), 5, 2).unwrap();
        assert_eq!(p.scores[0], 3.0);
        let expected = 1.0 / 3f64.log2()
            + 0.5
            + (1.0 / 3f64.log2() + 0.5 + 1.0 / 5f64.log2() + 1.0 / 6f64.log2());
        assert!((p.scores[1] - expected).abs() < 1e-12);
        assert!((p.scores[1] - 3.0794).abs() < 5e-4);
        assert_eq!(p.class_index, 1);
    }

    #[test]
    fn ensemble_errors() {
        let list = a(&[0, 1, 1, 1, 1]);
        assert!(matches!(
            ensemble_predict(&list, 4, 2),
            Err(Error::EvenKmax(4))
        ));
        assert!(matches!(
            ensemble_predict(&list, 7, 2),
            Err(Error::NeighborCount { .. })
        ));
    }

    #[test]
    fn ensemble_ignores_ranks_beyond_kmax() {
        let base = ensemble_predict(&a(&[0, 1, 1, 0, 0]), 3, 2).unwrap();
        let other = ensemble_predict(&a(&[0, 1, 1, 1, 1]), 3, 2).unwrap();
        assert_eq!(base, other);
    }

    #[test]
    fn method_parsing() {
        for m in Method::comparison_roster() {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert_eq!("KNN:7".parse::<Method>().unwrap(), Method::Knn(7));
        for bad in ["knn:0", "knn:", "knn:x", "svm", ""] {
            assert!(bad.parse::<Method>().is_err(), "{bad}");
        }
        assert_eq!(Method::comparison_roster().len(), 11);
    }

    #[test]
    fn single_training_example() {
        let train = Dataset::from_labeled(vec![vec![0.0, 0.0]], &["only"]).unwrap();
        for m in [
            Method::Knn(1),
            Method::SqrtKnn,
            Method::Iinc,
            Method::Ensemble,
        ] {
            let p = classify(&train, &[5.0, -1.0], m, &Metric::Manhattan).unwrap();
            assert_eq!(p.class_index, 0, "{m}");
        }
        assert!(classify(&train, &[5.0, -1.0], Method::Knn(3), &Metric::Manhattan).is_err());
    }

    /// Closed form of the double sum: rank `i` votes in every odd `k` with
    /// `i <= k <= kmax`.
    fn closed_form(classes: &[usize], kmax: usize, n_classes: usize) -> Vec<f64> {
        let mut ws = vec![0.0; n_classes];
        for (r, &c) in classes.iter().enumerate().take(kmax) {
            let i = r + 1;
            let odd_count = (i..=kmax).filter(|k| k % 2 == 1).count();
            ws[c] += odd_count as f64 / (1.0 + i as f64).log2();
        }
        ws
    }

    proptest! {
        #[test]
        fn ensemble_matches_closed_form(
            (classes, kmax) in (1usize..=16)
                .prop_flat_map(|h| (prop::collection::vec(0usize..4, 2 * h - 1), Just(2 * h - 1)))
        ) {
            let p = ensemble_predict(&a(&classes), kmax, 4).unwrap();
            let oracle = closed_form(&classes, kmax, 4);
            for c in 0..4 {
                prop_assert!((p.scores[c] - oracle[c]).abs() < 1e-12);
            }
        }

        #[test]
        fn argmax_scale_invariant(scores in prop::collection::vec(0.0..100.0f64, 1..8), scale in 1e-3..1e3f64) {
            let s = ClassScores(scores.clone());
            let scaled = ClassScores(scores.iter().map(|v| v * scale).collect());
            let ranked: Vec<usize> = (0..scores.len()).rev().collect();
            prop_assert_eq!(s.argmax(), scaled.argmax());
            prop_assert_eq!(s.argmax_nearest(&ranked), scaled.argmax_nearest(&ranked));
        }

        #[test]
        fn kmax_one_is_one_nn(classes in prop::collection::vec(0usize..3, 1..10)) {
            let list = a(&classes);
            prop_assert_eq!(
                ensemble_predict(&list, 1, 3).unwrap().class_index,
                knn_predict(&list, 1, 3).unwrap().class_index
            );
        }

        #[test]
        fn iinc_sums_to_one(classes in prop::collection::vec(0usize..5, 1..300)) {
            let p = iinc_predict(&a(&classes), 5).unwrap();
            prop_assert!((p.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
