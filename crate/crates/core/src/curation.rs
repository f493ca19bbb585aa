//! Nested, progressively harder datasets built from an ordering of samples.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intervals::{ConfidenceInterval, SampleInterval};
use crate::label_matrix::Verdict;
use crate::scalar::Scalar;

pub const DEFAULT_NUM_DATASETS: usize = 10;

/// Indices sorted by `keys` descending; ties keep the smaller index first.
pub fn order_by_key<T: Scalar>(keys: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order
}

/// Orders samples by interval lower bound, descending.
pub fn order_samples<T: Scalar>(intervals: &[ConfidenceInterval<T>]) -> Result<Vec<usize>> {
    if intervals.is_empty() {
        return Err(Error::Domain("cannot order an empty sample set".into()));
    }
    let keys: Vec<T> = intervals.iter().map(|ci| ci.lower).collect();
    Ok(order_by_key(&keys))
}

/// Prefix lengths `floor(n * total / num_datasets)` for `n < N`, and `total` for `n = N`.
pub fn prefix_lengths(total: usize, num_datasets: usize) -> Result<Vec<usize>> {
    if num_datasets == 0 {
        return Err(Error::Config("number of datasets must be at least 1".into()));
    }
    if num_datasets > total {
        return Err(Error::Config(format!(
            "cannot curate {num_datasets} non-empty nested datasets from {total} samples"
        )));
    }
    Ok((1..=num_datasets)
        .map(|n| if n == num_datasets { total } else { n * total / num_datasets })
        .collect())
}

/// A sample ordering sliced into nested datasets `D_1 ⊆ … ⊆ D_N`.
///
/// `labels[j]` and `scores[j]` belong to sample `ordering[j]`; `scores` is the
/// ordering key (the interval lower bound in the standard flow).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuratedSequence<T> {
    pub ordering: Vec<usize>,
    pub prefix_lengths: Vec<usize>,
    pub labels: Vec<Verdict>,
    pub scores: Vec<T>,
}

impl<T: Scalar> CuratedSequence<T> {
    pub fn num_datasets(&self) -> usize {
        self.prefix_lengths.len()
    }

    /// Sample indices of dataset `n` (1-based).
    pub fn dataset(&self, n: usize) -> &[usize] {
        &self.ordering[..self.prefix_lengths[n - 1]]
    }

    /// Estimated labels of dataset `n` (1-based), aligned with [`Self::dataset`].
    pub fn dataset_labels(&self, n: usize) -> &[Verdict] {
        &self.labels[..self.prefix_lengths[n - 1]]
    }

    /// Smallest ordering key within dataset `n` (1-based).
    pub fn min_score(&self, n: usize) -> T {
        self.scores[..self.prefix_lengths[n - 1]]
            .iter()
            .copied()
            .fold(T::infinity(), T::min)
    }

    /// The same samples in the opposite order, sliced with the same prefix rule.
    pub fn reversed(&self) -> Result<Self> {
        let mut ordering = self.ordering.clone();
        let mut labels = self.labels.clone();
        let mut scores = self.scores.clone();
        ordering.reverse();
        labels.reverse();
        scores.reverse();
        Ok(Self {
            prefix_lengths: prefix_lengths(ordering.len(), self.num_datasets())?,
            ordering,
            labels,
            scores,
        })
    }
}

/// Slices `ordering` into `num_datasets` nested prefixes. `labels` and `scores`
/// are indexed by sample.
pub fn curate<T: Scalar>(ordering: &[usize], labels: &[Verdict], scores: &[T], num_datasets: usize) -> Result<CuratedSequence<T>> {
    if labels.len() != ordering.len() || scores.len() != ordering.len() {
        return Err(Error::LengthMismatch {
            left: ordering.len(),
            right: labels.len().min(scores.len()),
        });
    }
    let mut seen = vec![false; ordering.len()];
    for &i in ordering {
        if i >= ordering.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain("ordering is not a permutation of the sample indices".into()));
        }
    }
    Ok(CuratedSequence {
        prefix_lengths: prefix_lengths(ordering.len(), num_datasets)?,
        ordering: ordering.to_vec(),
        labels: ordering.iter().map(|&i| labels[i]).collect(),
        scores: ordering.iter().map(|&i| scores[i]).collect(),
    })
}

/// Orders by interval lower bound and curates.
pub fn curate_by_lower_bound<T: Scalar>(samples: &[SampleInterval<T>], num_datasets: usize) -> Result<CuratedSequence<T>> {
    let intervals: Vec<_> = samples.iter().map(|s| s.interval).collect();
    let ordering = order_samples(&intervals)?;
    let labels: Vec<Verdict> = samples.iter().map(|s| s.label).collect();
    let keys: Vec<T> = intervals.iter().map(|ci| ci.lower).collect();
    curate(&ordering, &labels, &keys, num_datasets)
}

/// Orders by raw softmax confidence and curates.
pub fn curate_by_confidence<T: Scalar>(samples: &[SampleInterval<T>], num_datasets: usize) -> Result<CuratedSequence<T>> {
    if samples.is_empty() {
        return Err(Error::Domain("cannot order an empty sample set".into()));
    }
    let keys: Vec<T> = samples.iter().map(|s| s.confidence).collect();
    let labels: Vec<Verdict> = samples.iter().map(|s| s.label).collect();
    curate(&order_by_key(&keys), &labels, &keys, num_datasets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ci(lower: f64) -> ConfidenceInterval<f64> {
        ConfidenceInterval {
            lower,
            upper: 1.0,
            n: 1,
            s: 1.0,
            alpha: 0.05,
        }
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(order_samples(&[ci(0.9), ci(0.1), ci(0.5)]).unwrap(), vec![0, 2, 1]);
        assert_eq!(order_samples(&[ci(0.3); 4]).unwrap(), vec![0, 1, 2, 3]);
        assert!(order_samples::<f64>(&[]).is_err());
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(prefix_lengths(100, 10).unwrap(), (1..=10).map(|i| i * 10).collect::<Vec<_>>());
        assert_eq!(prefix_lengths(7, 3).unwrap(), vec![2, 4, 7]);
        assert_eq!(prefix_lengths(5, 1).unwrap(), vec![5]);
        assert!(prefix_lengths(3, 4).is_err());
        assert!(prefix_lengths(3, 0).is_err());
    }

    #[test]
    fn curate_attaches_labels_in_order() {
        let seq = curate(&[2, 0, 1], &[1, 2, 2], &[0.5, 0.2, 0.9], 3).unwrap();
        assert_eq!(seq.labels, vec![2, 1, 2]);
        assert_eq!(seq.scores, vec![0.9, 0.5, 0.2]);
        assert_eq!(seq.dataset(2), &[2, 0]);
        assert_eq!(seq.dataset_labels(1), &[2]);
        assert!(curate(&[0, 0, 1], &[1, 1, 1], &[0.0; 3], 1).is_err());
        assert!(curate(&[0, 1], &[1], &[0.0; 2], 1).is_err());
    }

    proptest! {
        #[test]
        fn ordering_matches_sort_oracle(keys in proptest::collection::vec(0u8..20, 1..60)) {
            let lows: Vec<f64> = keys.iter().map(|&k| k as f64 / 20.0).collect();
            let cis: Vec<_> = lows.iter().map(|&l| ci(l)).collect();
            // Oracle: sort (−key, index) pairs lexicographically on integers.
            let mut oracle: Vec<(i32, usize)> = keys.iter().enumerate().map(|(i, &k)| (-(k as i32), i)).collect();
            oracle.sort();
            let want: Vec<usize> = oracle.into_iter().map(|p| p.1).collect();
            prop_assert_eq!(order_samples(&cis).unwrap(), want);
        }

        #[test]
        fn curated_sequences_are_nested_and_monotone(
            lows in proptest::collection::vec(0.0f64..1.0, 1..80), n_frac in 0.0f64..1.0,
        ) {
            let total = lows.len();
            let n = 1 + ((total - 1) as f64 * n_frac) as usize;
            let cis: Vec<_> = lows.iter().map(|&l| ci(l)).collect();
            let ord = order_samples(&cis).unwrap();
            let seq = curate(&ord, &vec![1; total], &lows, n).unwrap();
            prop_assert!(seq.scores.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(seq.prefix_lengths.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(*seq.prefix_lengths.last().unwrap(), total);
            prop_assert!(seq.prefix_lengths[0] >= 1);
            for d in 1..n {
                prop_assert!(seq.dataset(d).iter().all(|i| seq.dataset(d + 1).contains(i)));
                prop_assert!(seq.min_score(d + 1) <= seq.min_score(d));
            }
        }
    }
}
