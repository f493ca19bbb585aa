//! Curation of adversarially ordered natural datasets from weak labels.
//!
//! Labeling-function verdicts go through four stages: dependent labeling
//! functions are pruned, the remainder are combined into probabilistic labels,
//! each label gets a Clopper-Pearson bound on its true confidence, and samples
//! are ordered by that lower bound into nested datasets that grow
//! progressively harder. With ground truth available, the ordering is checked
//! with Spearman's rank correlation.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.

pub mod curation;
pub mod error;
pub mod intervals;
pub mod label_matrix;
pub mod labeling;
pub mod pipeline;
pub mod pruning;
pub mod scalar;
pub mod stats;
pub mod synth;
pub mod validation;

pub use error::{Error, Result};
pub use label_matrix::{Corpus, Format, GroundTruth, LabelMatrix, Verdict, ABSTAIN};
pub use labeling::LabelerKind;
pub use pipeline::{OrderingKey, PipelineConfig};
pub use scalar::Scalar;
pub use synth::{LfSpec, SynthConfig, SynthCorpus};
pub use validation::ValidityVerdict;

pub type ConfidenceInterval = intervals::ConfidenceInterval<f64>;
pub type SampleInterval = intervals::SampleInterval<f64>;
pub type CorrelationMatrix = pruning::CorrelationMatrix<f64>;
pub type DependencyGraph = pruning::DependencyGraph<f64>;
pub type LfRanking = pruning::LfRanking<f64>;
pub type Pruning = pruning::Pruning<f64>;
pub type WeightVector = labeling::WeightVector<f64>;
pub type ProbabilisticLabel = labeling::ProbabilisticLabel<f64>;
pub type CuratedSequence = curation::CuratedSequence<f64>;
pub type ValidationReport = validation::ValidationReport<f64>;
pub type Spearman = validation::Spearman<f64>;
pub type PipelineOutput = pipeline::PipelineOutput<f64>;
pub type Labeled = pipeline::Labeled<f64>;
pub type ComparisonTable = pipeline::ComparisonTable<f64>;
pub type ComparisonCell = pipeline::ComparisonCell<f64>;

pub type ConfidenceIntervalF32 = intervals::ConfidenceInterval<f32>;
pub type WeightVectorF32 = labeling::WeightVector<f32>;
pub type CuratedSequenceF32 = curation::CuratedSequence<f32>;
pub type ValidationReportF32 = validation::ValidationReport<f32>;
