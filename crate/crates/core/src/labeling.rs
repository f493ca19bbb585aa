//! Probabilistic labels from a weighted vote passed through a softmax.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label_matrix::{LabelMatrix, Verdict, ABSTAIN};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

const ACCURACY_FLOOR: f64 = 0.01;
const ACCURACY_CEIL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelerKind {
    MajorityVote,
    Generative,
}

impl fmt::Display for LabelerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelerKind::MajorityVote => "majority_vote",
            LabelerKind::Generative => "generative",
        })
    }
}

impl FromStr for LabelerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" | "majority_vote" | "mv" => Ok(LabelerKind::MajorityVote),
            "generative" | "gen" => Ok(LabelerKind::Generative),
            other => Err(Error::Config(format!("unknown labeler {other:?}"))),
        }
    }
}

/// Non-negative weight per (class, labeling function).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector<T> {
    num_classes: u32,
    num_lfs: usize,
    /// Row-major: class `y` (1-based) occupies row `y - 1`.
    weights: Vec<T>,
    method: LabelerKind,
    /// Estimated per-LF accuracies, present for generative fits.
    accuracies: Option<Vec<T>>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn new(num_classes: u32, num_lfs: usize, weights: Vec<T>, method: LabelerKind) -> Result<Self> {
        if weights.len() != num_classes as usize * num_lfs {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: num_classes as usize * num_lfs,
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= T::zero())) {
            return Err(Error::Domain(format!("weights must be finite and non-negative, got {w}")));
        }
        Ok(Self {
            num_classes,
            num_lfs,
            weights,
            method,
            accuracies: None,
        })
    }

    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    pub fn num_lfs(&self) -> usize {
        self.num_lfs
    }

    pub fn method(&self) -> LabelerKind {
        self.method
    }

    pub fn accuracies(&self) -> Option<&[T]> {
        self.accuracies.as_deref()
    }

    /// Weight of labeling function `lf` when it votes for `class` (1-based).
    pub fn weight(&self, class: Verdict, lf: usize) -> T {
        self.weights[(class as usize - 1) * self.num_lfs + lf]
    }

    /// Multiplies every weight by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let mut out = Self::new(
            self.num_classes,
            self.num_lfs,
            self.weights.iter().map(|&w| w * factor).collect(),
            self.method,
        )?;
        out.accuracies = self.accuracies.clone();
        Ok(out)
    }

    fn check_matrix(&self, m: &LabelMatrix) -> Result<()> {
        if self.num_lfs != m.num_lfs() || self.num_classes != m.num_classes() {
            return Err(Error::Domain(format!(
                "weights shaped {}x{} do not fit a matrix with K={} and {} LFs",
                self.num_classes,
                self.num_lfs,
                m.num_classes(),
                m.num_lfs()
            )));
        }
        Ok(())
    }
}

/// Uniform weights of one: plain plurality voting.
pub fn majority_weights<T: Scalar>(m: &LabelMatrix) -> WeightVector<T> {
    WeightVector::new(
        m.num_classes(),
        m.num_lfs(),
        vec![T::one(); m.num_classes() as usize * m.num_lfs()],
        LabelerKind::MajorityVote,
    )
    .expect("shape is consistent by construction")
}

/// Per-LF accuracies of a conditionally independent label model with a uniform
/// class prior, fitted by expectation-maximization.
///
/// Each LF `i` votes the true class with probability `a_i` and each wrong class
/// with `(1 - a_i) / (K - 1)`. Posteriors start from vote shares and the loop
/// stops once no posterior moves by `tol` or more, or after `max_iters` rounds.
/// The emitted weight `max(0, ln(a_i (K-1) / (1 - a_i)))` is the log-likelihood
/// ratio of a vote, identical for every class.
pub fn fit_generative_weights<T: Scalar>(m: &LabelMatrix, max_iters: usize, tol: T) -> Result<WeightVector<T>> {
    let k = m.num_classes() as usize;
    let num_lfs = m.num_lfs();
    if m.entries().iter().all(|&v| v == ABSTAIN) {
        return Err(Error::Fit("every labeling function abstains on every sample".into()));
    }
    if max_iters == 0 {
        return Err(Error::Config("max_iters must be at least 1".into()));
    }

    let uniform = T::one() / T::from_count(k);
    let mut posteriors: Vec<T> = Vec::with_capacity(m.num_samples() * k);
    for row in m.rows() {
        let n = row.iter().filter(|&&v| v != ABSTAIN).count();
        for y in 1..=k as Verdict {
            if n == 0 {
                posteriors.push(uniform);
            } else {
                let c = row.iter().filter(|&&v| v == y).count();
                posteriors.push(T::from_count(c) / T::from_count(n));
            }
        }
    }

    let floor = T::lit(ACCURACY_FLOOR);
    let ceil = T::lit(ACCURACY_CEIL);
    let wrong_classes = T::from_count(k - 1);
    let mut accuracies = vec![uniform; num_lfs];
    let mut log_post = vec![T::zero(); k];

    for _ in 0..max_iters {
        // M-step
        let mut agree = vec![T::zero(); num_lfs];
        let mut votes = vec![0usize; num_lfs];
        for (row, post) in m.rows().zip(posteriors.chunks_exact(k)) {
            for (i, &v) in row.iter().enumerate() {
                if v != ABSTAIN {
                    agree[i] = agree[i] + post[v as usize - 1];
                    votes[i] += 1;
                }
            }
        }
        for i in 0..num_lfs {
            let a = if votes[i] == 0 {
                uniform
            } else {
                agree[i] / T::from_count(votes[i])
            };
            accuracies[i] = a.max(floor).min(ceil);
        }

        // E-step
        let ln_right: Vec<T> = accuracies.iter().map(|a| a.ln()).collect();
        let ln_wrong: Vec<T> = accuracies.iter().map(|&a| ((T::one() - a) / wrong_classes).ln()).collect();
        let mut max_change = T::zero();
        for (row, post) in m.rows().zip(posteriors.chunks_exact_mut(k)) {
            log_post.iter_mut().for_each(|l| *l = T::zero());
            for (i, &v) in row.iter().enumerate() {
                if v == ABSTAIN {
                    continue;
                }
                for (y, l) in log_post.iter_mut().enumerate() {
                    *l = *l + if v as usize == y + 1 { ln_right[i] } else { ln_wrong[i] };
                }
            }
            let updated = softmax(&log_post);
            for (p, q) in post.iter_mut().zip(updated) {
                max_change = max_change.max((*p - q).abs());
                *p = q;
            }
        }
        if max_change < tol {
            break;
        }
    }

    let weights_per_lf: Vec<T> = accuracies
        .iter()
        .map(|&a| (a * wrong_classes / (T::one() - a)).ln().max(T::zero()))
        .collect();
    let weights = (0..k).flat_map(|_| weights_per_lf.iter().copied()).collect();
    let mut w = WeightVector::new(m.num_classes(), num_lfs, weights, LabelerKind::Generative)?;
    w.accuracies = Some(accuracies);
    Ok(w)
}

/// Fits weights of the requested kind with default EM settings.
pub fn fit_weights<T: Scalar>(m: &LabelMatrix, kind: LabelerKind) -> Result<WeightVector<T>> {
    match kind {
        LabelerKind::MajorityVote => Ok(majority_weights(m)),
        LabelerKind::Generative => fit_generative_weights(m, DEFAULT_MAX_ITERS, T::lit(DEFAULT_TOL)),
    }
}

/// Numerically stable softmax.
pub fn softmax<T: Scalar>(scores: &[T]) -> Vec<T> {
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = scores.iter().map(|&s| (s - max).exp()).collect();
    let total = exps.iter().fold(T::zero(), |a, &b| a + b);
    exps.into_iter().map(|e| e / total).collect()
}

/// Estimated label, its softmax confidence, and the number of non-abstaining votes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilisticLabel<T> {
    pub label: Verdict,
    pub confidence: T,
    pub votes: usize,
}

/// Per-class scores `score(y) = sum_i w_i^(y) * 1(lambda_i(x) = y)`.
pub fn class_scores<T: Scalar>(m: &LabelMatrix, w: &WeightVector<T>, sample: usize) -> Result<Vec<T>> {
    w.check_matrix(m)?;
    m.check_sample(sample)?;
    let mut scores = vec![T::zero(); m.num_classes() as usize];
    for (i, &v) in m.row(sample).iter().enumerate() {
        if v != ABSTAIN {
            scores[v as usize - 1] = scores[v as usize - 1] + w.weight(v, i);
        }
    }
    Ok(scores)
}

/// Label and confidence for one sample from already computed class scores.
/// Ties go to the smallest class; `votes == 0` yields label 1 at confidence 1/K.
pub fn label_from_scores<T: Scalar>(scores: &[T], votes: usize) -> ProbabilisticLabel<T> {
    if votes == 0 {
        return ProbabilisticLabel {
            label: 1,
            confidence: T::one() / T::from_count(scores.len()),
            votes,
        };
    }
    let probs = softmax(scores);
    let (best, conf) = probs
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::neg_infinity()), |acc, (i, p)| if p > acc.1 { (i, p) } else { acc });
    ProbabilisticLabel {
        label: best as Verdict + 1,
        confidence: conf,
        votes,
    }
}

pub fn combine<T: Scalar>(m: &LabelMatrix, w: &WeightVector<T>, sample: usize) -> Result<ProbabilisticLabel<T>> {
    let scores = class_scores(m, w, sample)?;
    Ok(label_from_scores(&scores, m.vote_count(sample)?))
}

pub fn label_all<T: Scalar>(m: &LabelMatrix, w: &WeightVector<T>) -> Result<Vec<ProbabilisticLabel<T>>> {
    (0..m.num_samples()).map(|i| combine(m, w, i)).collect()
}
