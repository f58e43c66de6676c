//! Nearest-neighbor selection.
//!
//! [`nearest`] keeps the `m` closest training examples in a binary max-heap
//! capped at `m` entries while streaming over the training set once: a
//! candidate is compared against the current farthest kept neighbor and
//! either rejected or swapped in. That costs `O(n log m)` comparisons in the
//! worst case instead of the `O(n log n)` of sorting every distance, which is
//! what [`rank_all`] does for classifiers that need the full ordering.
//!
//! Ties in distance are broken by ascending training-set index, so both
//! functions produce the same order and `nearest(.., m)` is always a prefix
//! of `rank_all`.

use std::cmp::Ordering;

use crate::dataset::Dataset;
use crate::distance::Distance;
use crate::error::{Error, Result};

/// Classes (the array `A` of the ensemble rule) and distances of the nearest
/// training examples, ascending by distance.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub classes: Vec<usize>,
    pub distances: Vec<f64>,
    /// Training-set row of each neighbor.
    pub indices: Vec<usize>,
}

impl NeighborList {
    /// A list with the given classes at strictly increasing unit distances.
    pub fn from_classes(classes: Vec<usize>) -> Self {
        let n = classes.len();
        Self {
            classes,
            distances: (1..=n).map(|d| d as f64).collect(),
            indices: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// The first `m` neighbors.
    pub fn truncated(&self, m: usize) -> Self {
        let m = m.min(self.len());
        Self {
            classes: self.classes[..m].to_vec(),
            distances: self.distances[..m].to_vec(),
            indices: self.indices[..m].to_vec(),
        }
    }

    fn from_candidates(train: &Dataset, sorted: impl IntoIterator<Item = Candidate>) -> Self {
        let mut list = Self {
            classes: Vec::new(),
            distances: Vec::new(),
            indices: Vec::new(),
        };
        for c in sorted {
            list.classes.push(train.label(c.index));
            list.distances.push(c.distance);
            list.indices.push(c.index);
        }
        list
    }
}

/// Largest odd integer `<= floor(sqrt(n_train))`, at least 1. This is both
/// the largest `k` in the ensemble and the number of neighbors it needs.
pub fn kmax_for(n_train: usize) -> usize {
    let root = n_train.isqrt().max(1);
    if root.is_multiple_of(2) {
        root - 1
    } else {
        root
    }
}

/// `floor(sqrt(n_train))`, at least 1; the `k` of the sqrt(n)-NN baseline.
pub fn sqrt_k(n_train: usize) -> usize {
    n_train.isqrt().max(1)
}

/// Observes the bounded selection pass. Used to count comparisons and track
/// the heap size in tests and benchmarks; `()` ignores everything.
pub trait SelectionProbe {
    fn compared(&mut self) {}
    fn resized(&mut self, _len: usize) {}
}

impl SelectionProbe for () {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComparisonCounter {
    pub comparisons: u64,
    pub max_len: usize,
}

impl SelectionProbe for ComparisonCounter {
    fn compared(&mut self) {
        self.comparisons += 1;
    }

    fn resized(&mut self, len: usize) {
        self.max_len = self.max_len.max(len);
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    distance: f64,
    index: usize,
}

impl Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

/// Binary max-heap holding at most `capacity` candidates; the root is the
/// farthest candidate kept so far.
struct BoundedMaxHeap<'p, P: SelectionProbe> {
    items: Vec<Candidate>,
    capacity: usize,
    probe: &'p mut P,
}

impl<'p, P: SelectionProbe> BoundedMaxHeap<'p, P> {
    fn new(capacity: usize, probe: &'p mut P) -> Self {
        Self {
            items: Vec::with_capacity(capacity),
            capacity,
            probe,
        }
    }

    fn greater(&mut self, a: usize, b: usize) -> bool {
        self.probe.compared();
        self.items[a].cmp(&self.items[b]) == Ordering::Greater
    }

    fn offer(&mut self, candidate: Candidate) {
        if self.items.len() < self.capacity {
            self.items.push(candidate);
            self.sift_up(self.items.len() - 1);
            self.probe.resized(self.items.len());
            return;
        }
        self.probe.compared();
        if candidate.cmp(&self.items[0]) == Ordering::Less {
            self.items[0] = candidate;
            self.sift_down(0);
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.greater(i, parent) {
                break;
            }
            self.items.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.items.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.greater(right, left) {
                right
            } else {
                left
            };
            if !self.greater(child, i) {
                break;
            }
            self.items.swap(i, child);
            i = child;
        }
    }

    /// Drains the heap into ascending order.
    fn into_sorted(mut self) -> Vec<Candidate> {
        let mut out = Vec::with_capacity(self.items.len());
        while let Some(last) = self.items.pop() {
            if self.items.is_empty() {
                out.push(last);
                break;
            }
            out.push(std::mem::replace(&mut self.items[0], last));
            self.sift_down(0);
        }
        out.reverse();
        out
    }
}

fn check_query(train: &Dataset, query: &[f64]) -> Result<()> {
    if query.len() != train.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            found: query.len(),
        });
    }
    Ok(())
}

/// The `m` training examples closest to `query`, nearest first.
pub fn nearest<D: Distance + ?Sized>(
    train: &Dataset,
    query: &[f64],
    m: usize,
    metric: &D,
) -> Result<NeighborList> {
    nearest_with_probe(train, query, m, metric, &mut ())
}

pub fn nearest_with_probe<D: Distance + ?Sized, P: SelectionProbe>(
    train: &Dataset,
    query: &[f64],
    m: usize,
    metric: &D,
    probe: &mut P,
) -> Result<NeighborList> {
    if m == 0 || m > train.len() {
        return Err(Error::NeighborCount {
            requested: m,
            available: train.len(),
        });
    }
    check_query(train, query)?;
    let mut heap = BoundedMaxHeap::new(m, probe);
    for (index, example) in train.examples().enumerate() {
        heap.offer(Candidate {
            distance: metric.eval(example, query),
            index,
        });
    }
    Ok(NeighborList::from_candidates(train, heap.into_sorted()))
}

/// Every training example ranked by distance to `query`, nearest first.
pub fn rank_all<D: Distance + ?Sized>(
    train: &Dataset,
    query: &[f64],
    metric: &D,
) -> Result<NeighborList> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_query(train, query)?;
    let mut all: Vec<Candidate> = train
        .examples()
        .enumerate()
        .map(|(index, example)| Candidate {
            distance: metric.eval(example, query),
            index,
        })
        .collect();
    all.sort_unstable_by(Candidate::cmp);
    Ok(NeighborList::from_candidates(train, all))
}
