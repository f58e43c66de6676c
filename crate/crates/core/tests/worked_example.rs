//! A 25-point, two-class layout whose five nearest neighbors of the query
//! have classes 0, 1, 1, 1, 1, as in the classic small illustration of the
//! ensemble rule: 1-NN says class 0, the weighted ensemble says class 1.

use ensemble_knn::classifiers::{classify, ensemble_predict, knn_predict, Method};
use ensemble_knn::neighbors::{kmax_for, nearest, rank_all};
use ensemble_knn::{Dataset, Metric};

const QUERY: [f64; 2] = [0.0, 0.0];

fn layout() -> Dataset {
    let mut examples = vec![
        vec![0.5, 0.5], // class 0, distance 1
        vec![2.0, 0.0], // class 1, distance 2
        vec![0.0, 3.0],
        vec![-2.0, -2.0],
        vec![5.0, 0.0],
    ];
    let mut labels = vec!["0", "1", "1", "1", "1"];
    for i in 0..20 {
        let angle = i as f64 * 0.3;
        examples.push(vec![10.0 + angle.cos() * 3.0, 10.0 + angle.sin() * 3.0]);
        labels.push(if i < 12 { "0" } else { "1" });
    }
    Dataset::from_labeled(examples, &labels).unwrap()
}

#[test]
fn five_nearest_classes() {
    let train = layout();
    assert_eq!(train.len(), 25);
    assert_eq!(kmax_for(train.len()), 5);
    let five = nearest(&train, &QUERY, 5, &Metric::Manhattan).unwrap();
    assert_eq!(five.classes, vec![0, 1, 1, 1, 1]);
    assert_eq!(five.distances, vec![1.0, 2.0, 3.0, 4.0, 5.0]);

    let all = rank_all(&train, &QUERY, &Metric::Manhattan).unwrap();
    assert_eq!(all.len(), 25);
    assert_eq!(&all.classes[..5], &[0, 1, 1, 1, 1]);
    assert_eq!(all.truncated(5), five);
}

#[test]
fn ensemble_overrules_one_nn() {
    let train = layout();
    let one = classify(&train, &QUERY, Method::Knn(1), &Metric::Manhattan).unwrap();
    assert_eq!(one.class_index, 0);
    let ens = classify(&train, &QUERY, Method::Ensemble, &Metric::Manhattan).unwrap();
    assert_eq!(ens.class_index, 1);
    assert_eq!(ens.scores[0], 3.0);
    assert!((ens.scores[1] - 3.0794).abs() < 5e-4);
}

#[test]
fn per_classifier_contributions() {
    // each odd-k classifier adds its own weighted votes; the totals are their sums
    let list = nearest(&layout(), &QUERY, 5, &Metric::Manhattan).unwrap();
    let mut previous = [0.0; 2];
    let mut contributions = Vec::new();
    for k in [1, 3, 5] {
        let p = ensemble_predict(&list, k, 2).unwrap();
        contributions.push([p.scores[0] - previous[0], p.scores[1] - previous[1]]);
        previous = [p.scores[0], p.scores[1]];
    }
    let round2 = |x: f64| (x * 100.0).round() / 100.0;
    assert_eq!(contributions[0], [1.0, 0.0]);
    assert_eq!(round2(contributions[1][1]), 1.13);
    assert_eq!(round2(contributions[2][1]), 1.95);
    assert_eq!(knn_predict(&list, 5, 2).unwrap().class_index, 1);
}

#[test]
fn ensemble_ignores_far_neighbors() {
    // moving examples ranked beyond kmax (without reordering the top five)
    // cannot change the ensemble decision
    let train = layout();
    let base = classify(&train, &QUERY, Method::Ensemble, &Metric::Manhattan).unwrap();
    let mut examples: Vec<Vec<f64>> = train.examples().map(<[f64]>::to_vec).collect();
    for e in examples.iter_mut().skip(5) {
        e[0] += 40.0;
        e[1] -= 7.0;
    }
    let moved = Dataset::new(
        examples,
        train.labels().to_vec(),
        train.class_names().to_vec(),
    )
    .unwrap();
    let after = classify(&moved, &QUERY, Method::Ensemble, &Metric::Manhattan).unwrap();
    assert_eq!(base, after);
}
