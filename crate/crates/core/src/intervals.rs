//! Clopper-Pearson bounds on the true confidence of each estimated label.
//!
//! Each non-abstaining vote is treated as a Bernoulli trial: `n` is the number
//! of votes and the (generally non-integer) success mass `s` is `n` times the
//! softmax confidence of the winning label.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::label_matrix::{LabelMatrix, Verdict};
use crate::labeling::{class_scores, label_from_scores, WeightVector};
use crate::scalar::Scalar;
use crate::stats::beta_quantile;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval<T> {
    pub lower: T,
    pub upper: T,
    pub n: usize,
    pub s: T,
    pub alpha: T,
}

impl<T: Scalar> ConfidenceInterval<T> {
    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, mu: T) -> bool {
        self.lower <= mu && mu <= self.upper
    }
}

/// Clopper-Pearson interval for `s` successes in `n` trials at level `alpha`.
///
/// `lower = Beta(alpha/2; s, n-s+1)` (0 when `s = 0`) and
/// `upper = Beta(1-alpha/2; s+1, n-s)` (1 when `s = n`). Real `s` is used as is.
pub fn clopper_pearson<T: Scalar>(n: usize, s: T, alpha: T) -> Result<ConfidenceInterval<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Config(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let nf = T::from_count(n);
    if s.is_nan() || s < T::zero() || s > nf {
        return Err(Error::Domain(format!("success mass {s} outside [0, {n}]")));
    }
    let half = alpha / T::lit(2.0);
    let lower = if s == T::zero() {
        T::zero()
    } else {
        beta_quantile(half, s, nf - s + T::one())?
    };
    let upper = if s == nf {
        T::one()
    } else {
        beta_quantile(T::one() - half, s + T::one(), nf - s)?
    };
    Ok(ConfidenceInterval {
        lower,
        upper: upper.max(lower),
        n,
        s,
        alpha,
    })
}

pub fn vote_count(m: &LabelMatrix, sample: usize) -> Result<usize> {
    m.vote_count(sample)
}

/// `n(x) * confidence(x)`.
pub fn success_mass<T: Scalar>(m: &LabelMatrix, w: &WeightVector<T>, sample: usize) -> Result<T> {
    let scores = class_scores(m, w, sample)?;
    let n = m.vote_count(sample)?;
    Ok(mass(n, label_from_scores(&scores, n).confidence))
}

fn mass<T: Scalar>(n: usize, confidence: T) -> T {
    if n == 0 {
        return T::zero();
    }
    let nf = T::from_count(n);
    (nf * confidence).min(nf)
}

/// One sample's estimated label together with its interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleInterval<T> {
    pub index: usize,
    pub label: Verdict,
    pub confidence: T,
    pub interval: ConfidenceInterval<T>,
}

pub fn intervals_for_matrix<T: Scalar>(m: &LabelMatrix, w: &WeightVector<T>, alpha: T) -> Result<Vec<SampleInterval<T>>> {
    (0..m.num_samples())
        .map(|index| {
            let scores = class_scores(m, w, index)?;
            let n = m.vote_count(index)?;
            let pl = label_from_scores(&scores, n);
            let interval = clopper_pearson(n, mass(n, pl.confidence), alpha)?;
            Ok(SampleInterval {
                index,
                label: pl.label,
                confidence: pl.confidence,
                interval,
            })
        })
        .collect()
}
