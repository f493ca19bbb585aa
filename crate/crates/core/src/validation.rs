//! Ground-truth checks of a curated sequence: per-dataset accuracy, Spearman's
//! rank correlation of those accuracies against dataset position, and the
//! validity verdict.

use std::cmp::Ordering;
use std::io::Write;

use serde::Serialize;

use crate::curation::CuratedSequence;
use crate::error::{Error, Result};
use crate::label_matrix::{GroundTruth, Verdict};
use crate::scalar::Scalar;
use crate::stats::{pearson, student_t_two_sided_p};

pub const DEFAULT_GAMMA: f64 = 0.05;

/// z-value of the two-sided 90% normal interval used for error bars.
const ERROR_BAR_Z: f64 = 1.64;

pub fn accuracy<T: Scalar>(truth: &[Verdict], weak: &[Verdict]) -> Result<T> {
    if truth.len() != weak.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: weak.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Domain("accuracy of an empty label set".into()));
    }
    let hits = truth.iter().zip(weak).filter(|(a, b)| a == b).count();
    Ok(T::from_count(hits) / T::from_count(truth.len()))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![T::zero(); values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end, mean = (start + 1 + end) / 2
        let rank = T::from_count(start + 1 + end) / T::lit(2.0);
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spearman<T> {
    pub rho: T,
    pub p_value: T,
    /// Set when every value was equal and the convention rho = 0, p = 1 applied.
    pub degenerate: bool,
}

/// Two-sided p-value of a Spearman coefficient over `n` points, from
/// `t = rho * sqrt((n - 2) / (1 - rho^2))` with `n - 2` degrees of freedom.
pub fn spearman_p_value<T: Scalar>(rho: T, n: usize) -> Result<T> {
    if n < 3 {
        return Err(Error::Domain(format!("spearman needs at least 3 points, got {n}")));
    }
    if !(rho >= -T::one() && rho <= T::one()) {
        return Err(Error::Domain(format!("rho {rho} outside [-1, 1]")));
    }
    let denom = T::one() - rho * rho;
    if denom <= T::zero() {
        return Ok(T::zero());
    }
    let t = rho * (T::from_count(n - 2) / denom).sqrt();
    student_t_two_sided_p(t, (n - 2) as u32)
}

/// Spearman correlation between dataset position `1..=N` and `values`.
pub fn spearman<T: Scalar>(values: &[T]) -> Result<Spearman<T>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Domain(format!("spearman needs at least 3 points, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("spearman input must be finite".into()));
    }
    let positions: Vec<T> = (1..=n).map(T::from_count).collect();
    let ranks = average_ranks(values);
    match pearson(&positions, &ranks)? {
        None => Ok(Spearman {
            rho: T::zero(),
            p_value: T::one(),
            degenerate: true,
        }),
        Some(rho) => {
            // Snap rounding residue so perfect orderings give p = 0 exactly.
            let rho = if (rho.abs() - T::one()).abs() <= T::lit(8.0) * T::epsilon() {
                rho.signum()
            } else {
                rho
            };
            Ok(Spearman {
                rho,
                p_value: spearman_p_value(rho, n)?,
                degenerate: false,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityVerdict {
    ValidAdversarial,
    Invalid,
}

/// Valid iff the trend is decreasing (`rho < 0`) and significant (`p <= gamma`).
pub fn validity_verdict<T: Scalar>(rho: T, p_value: T, gamma: T) -> ValidityVerdict {
    if rho < T::zero() && p_value <= gamma {
        ValidityVerdict::ValidAdversarial
    } else {
        ValidityVerdict::Invalid
    }
}

/// Half-width `1.64 * sqrt(acc (1 - acc) / size)` of a 90% binomial error bar.
pub fn binomial_ci_halfwidth<T: Scalar>(acc: T, size: usize) -> Result<T> {
    if size == 0 {
        return Err(Error::Domain("error bar for an empty dataset".into()));
    }
    if !(acc >= T::zero() && acc <= T::one()) {
        return Err(Error::Domain(format!("accuracy {acc} outside [0, 1]")));
    }
    Ok(T::lit(ERROR_BAR_Z) * (acc * (T::one() - acc) / T::from_count(size)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport<T> {
    pub sizes: Vec<usize>,
    pub accuracies: Vec<T>,
    pub ci_halfwidths: Vec<T>,
    pub rho: T,
    pub p_value: T,
    pub gamma: T,
    pub verdict: ValidityVerdict,
    pub degenerate: bool,
}

pub fn validate_sequence<T: Scalar>(seq: &CuratedSequence<T>, truth: &GroundTruth, gamma: T) -> Result<ValidationReport<T>> {
    if !(gamma > T::zero() && gamma < T::one()) {
        return Err(Error::Config(format!("gamma must lie in (0,1), got {gamma}")));
    }
    if truth.len() != seq.ordering.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: seq.ordering.len(),
        });
    }
    let labels = truth.labels();
    let mut accuracies = Vec::with_capacity(seq.num_datasets());
    let mut halfwidths = Vec::with_capacity(seq.num_datasets());
    for n in 1..=seq.num_datasets() {
        let true_labels: Vec<Verdict> = seq.dataset(n).iter().map(|&i| labels[i]).collect();
        let acc = accuracy(&true_labels, seq.dataset_labels(n))?;
        halfwidths.push(binomial_ci_halfwidth(acc, true_labels.len())?);
        accuracies.push(acc);
    }
    let sp = spearman(&accuracies)?;
    Ok(ValidationReport {
        sizes: seq.prefix_lengths.clone(),
        verdict: validity_verdict(sp.rho, sp.p_value, gamma),
        accuracies,
        ci_halfwidths: halfwidths,
        rho: sp.rho,
        p_value: sp.p_value,
        gamma,
        degenerate: sp.degenerate,
    })
}

/// Plot data: one row per dataset with its fraction of samples, accuracy and
/// error-bar half-width.
pub fn write_plot_csv<T: Scalar, W: Write>(report: &ValidationReport<T>, mut out: W) -> Result<()> {
    writeln!(out, "dataset,fraction,size,accuracy,halfwidth")?;
    let n = report.accuracies.len();
    for (i, ((acc, hw), size)) in report
        .accuracies
        .iter()
        .zip(&report.ci_halfwidths)
        .zip(&report.sizes)
        .enumerate()
    {
        let fraction = (i + 1) as f64 / n as f64;
        writeln!(out, "{},{fraction},{size},{acc},{hw}", i + 1)?;
    }
    Ok(())
}
