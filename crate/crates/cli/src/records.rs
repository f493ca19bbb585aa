//! JSON shapes emitted by the command-line tool.

use natcurate::{CuratedSequence, Labeled, PipelineConfig, Pruning, SampleInterval};
use serde::Serialize;

#[derive(Serialize)]
pub struct LabelRecord {
    pub index: usize,
    pub label: u32,
    pub confidence: f64,
    pub n: usize,
}

#[derive(Serialize)]
pub struct IntervalRecord {
    pub index: usize,
    pub label: u32,
    pub confidence: f64,
    pub n: usize,
    pub s: f64,
    pub theta_l: f64,
    pub theta_u: f64,
}

pub fn label_records(samples: &[SampleInterval]) -> Vec<LabelRecord> {
    samples
        .iter()
        .map(|s| LabelRecord {
            index: s.index,
            label: s.label,
            confidence: s.confidence,
            n: s.interval.n,
        })
        .collect()
}

pub fn interval_records(samples: &[SampleInterval]) -> Vec<IntervalRecord> {
    samples
        .iter()
        .map(|s| IntervalRecord {
            index: s.index,
            label: s.label,
            confidence: s.confidence,
            n: s.interval.n,
            s: s.interval.s,
            theta_l: s.interval.lower,
            theta_u: s.interval.upper,
        })
        .collect()
}

#[derive(Serialize)]
pub struct DatasetRecord<'a> {
    pub n: usize,
    pub size: usize,
    pub indices: &'a [usize],
    pub labels: &'a [u32],
}

#[derive(Serialize)]
pub struct CurationManifest<'a> {
    #[serde(rename = "N")]
    pub num_datasets: usize,
    pub ordering: &'a [usize],
    pub datasets: Vec<DatasetRecord<'a>>,
}

pub fn curation_manifest(seq: &CuratedSequence) -> CurationManifest<'_> {
    CurationManifest {
        num_datasets: seq.num_datasets(),
        ordering: &seq.ordering,
        datasets: (1..=seq.num_datasets())
            .map(|n| DatasetRecord {
                n,
                size: seq.prefix_lengths[n - 1],
                indices: seq.dataset(n),
                labels: seq.dataset_labels(n),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct PruneReport<'a> {
    pub kept: Vec<&'a str>,
    pub kept_indices: &'a [usize],
    pub removed: Vec<&'a str>,
    pub delta: f64,
    pub edges: Vec<[&'a str; 2]>,
    pub cliques: Vec<Vec<&'a str>>,
    pub ranking: Vec<&'a str>,
    pub clique_membership_counts: &'a [usize],
    pub coverages: &'a [f64],
    pub lf_names: &'a [String],
    /// Row-major; `null` marks an undefined correlation.
    pub correlations: Vec<&'a [Option<f64>]>,
}

pub fn prune_report<'a>(names: &'a [String], p: &'a Pruning, delta: f64) -> PruneReport<'a> {
    let name = |i: usize| names[i].as_str();
    PruneReport {
        kept: p.kept.iter().map(|&i| name(i)).collect(),
        kept_indices: &p.kept,
        removed: p.removed().into_iter().map(name).collect(),
        delta,
        edges: p.graph.edges().iter().map(|&(a, b)| [name(a), name(b)]).collect(),
        cliques: p.cliques.iter().map(|c| c.iter().map(|&i| name(i)).collect()).collect(),
        ranking: p.ranking.order.iter().map(|&i| name(i)).collect(),
        clique_membership_counts: &p.ranking.clique_membership_counts,
        coverages: &p.ranking.coverages,
        lf_names: names,
        correlations: p.correlations.rows().collect(),
    }
}

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub input: String,
    pub truth: Option<String>,
    pub config: &'a PipelineConfig,
    pub num_samples: usize,
    pub num_classes: u32,
    pub lf_names: &'a [String],
    pub used_lfs: Vec<&'a str>,
    pub mean_confidence: f64,
    pub verdict: Option<natcurate::ValidityVerdict>,
    pub artifacts: Vec<&'static str>,
}

pub fn used_lf_names<'a>(names: &'a [String], labeled: &Labeled) -> Vec<&'a str> {
    labeled.lfs.iter().map(|&i| names[i].as_str()).collect()
}
