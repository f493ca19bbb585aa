//! End-to-end curation: prune → label → intervals → curate, optionally validated.

use serde::{Deserialize, Serialize};

use crate::curation::{curate_by_confidence, curate_by_lower_bound, CuratedSequence, DEFAULT_NUM_DATASETS};
use crate::error::{Error, Result};
use crate::intervals::{intervals_for_matrix, SampleInterval, DEFAULT_ALPHA};
use crate::label_matrix::{GroundTruth, LabelMatrix};
use crate::labeling::{fit_weights, LabelerKind, WeightVector};
use crate::pruning::{prune, Pruning, DEFAULT_DELTA};
use crate::scalar::Scalar;
use crate::validation::{validate_sequence, ValidationReport, ValidityVerdict, DEFAULT_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub delta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub num_datasets: usize,
    pub labeler: LabelerKind,
    pub skip_pruning: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            num_datasets: DEFAULT_NUM_DATASETS,
            labeler: LabelerKind::Generative,
            skip_pruning: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::Config(format!("delta must lie in [0,1], got {}", self.delta)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        if self.num_datasets == 0 {
            return Err(Error::Config("number of datasets must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which samples the ordering key is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingKey {
    /// Raw softmax confidence.
    Confidence,
    /// Clopper-Pearson lower bound.
    LowerBound,
}

/// Labels and intervals for one labeling-function subset.
#[derive(Debug, Clone)]
pub struct Labeled<T> {
    /// Column indices (into the input matrix) that took part in labeling.
    pub lfs: Vec<usize>,
    pub pruning: Option<Pruning<T>>,
    pub weights: WeightVector<T>,
    pub samples: Vec<SampleInterval<T>>,
}

impl<T: Scalar> Labeled<T> {
    pub fn mean_confidence(&self) -> T {
        let total = self.samples.iter().fold(T::zero(), |acc, s| acc + s.confidence);
        total / T::from_count(self.samples.len())
    }
}

/// Prunes (unless `skip_pruning`), fits weights, and computes per-sample intervals.
pub fn label_stage<T: Scalar>(m: &LabelMatrix, cfg: &PipelineConfig) -> Result<Labeled<T>> {
    cfg.validate()?;
    let (lfs, pruning) = if cfg.skip_pruning {
        ((0..m.num_lfs()).collect(), None)
    } else {
        let p = prune(m, T::lit(cfg.delta))?;
        (p.kept.clone(), Some(p))
    };
    let restricted = m.restrict(&lfs)?;
    let weights = fit_weights(&restricted, cfg.labeler)?;
    let samples = intervals_for_matrix(&restricted, &weights, T::lit(cfg.alpha))?;
    Ok(Labeled {
        lfs,
        pruning,
        weights,
        samples,
    })
}

#[derive(Debug, Clone)]
pub struct PipelineOutput<T> {
    pub labeled: Labeled<T>,
    pub curated: CuratedSequence<T>,
    pub report: Option<ValidationReport<T>>,
}

pub fn run_pipeline<T: Scalar>(m: &LabelMatrix, truth: Option<&GroundTruth>, cfg: &PipelineConfig) -> Result<PipelineOutput<T>> {
    let labeled = label_stage(m, cfg)?;
    let curated = curate_by_lower_bound(&labeled.samples, cfg.num_datasets)?;
    let report = truth
        .map(|t| validate_sequence(&curated, t, T::lit(cfg.gamma)))
        .transpose()?;
    Ok(PipelineOutput {
        labeled,
        curated,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonCell<T> {
    pub ordering: OrderingKey,
    pub all_lfs: bool,
    pub num_lfs: usize,
    pub accuracies: Vec<T>,
    pub rho: T,
    pub p_value: T,
    pub verdict: ValidityVerdict,
}

/// The four orderings: {confidence, lower bound} × {all LFs, independent LFs}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable<T> {
    pub num_datasets: usize,
    pub cells: Vec<ComparisonCell<T>>,
}

impl<T: Scalar> ComparisonTable<T> {
    pub fn cell(&self, ordering: OrderingKey, all_lfs: bool) -> &ComparisonCell<T> {
        self.cells
            .iter()
            .find(|c| c.ordering == ordering && c.all_lfs == all_lfs)
            .expect("table holds all four cells")
    }

    /// The full approach: independent LFs ordered by lower bound.
    pub fn full_approach(&self) -> &ComparisonCell<T> {
        self.cell(OrderingKey::LowerBound, false)
    }
}

pub fn run_comparatives<T: Scalar>(m: &LabelMatrix, truth: &GroundTruth, cfg: &PipelineConfig) -> Result<ComparisonTable<T>> {
    let mut cells = Vec::with_capacity(4);
    for all_lfs in [true, false] {
        let labeled = label_stage::<T>(
            m,
            &PipelineConfig {
                skip_pruning: all_lfs,
                ..*cfg
            },
        )?;
        for ordering in [OrderingKey::Confidence, OrderingKey::LowerBound] {
            let seq = match ordering {
                OrderingKey::Confidence => curate_by_confidence(&labeled.samples, cfg.num_datasets)?,
                OrderingKey::LowerBound => curate_by_lower_bound(&labeled.samples, cfg.num_datasets)?,
            };
            let r = validate_sequence(&seq, truth, T::lit(cfg.gamma))?;
            cells.push(ComparisonCell {
                ordering,
                all_lfs,
                num_lfs: labeled.lfs.len(),
                accuracies: r.accuracies,
                rho: r.rho,
                p_value: r.p_value,
                verdict: r.verdict,
            });
        }
    }
    Ok(ComparisonTable {
        num_datasets: cfg.num_datasets,
        cells,
    })
}
