use natcurate::labeling::fit_generative_weights;
use natcurate::pipeline::{label_stage, run_comparatives, run_pipeline, OrderingKey};
use natcurate::synth::{generate, LfSpec, SynthConfig};
use natcurate::{LabelerKind, PipelineConfig, ValidityVerdict};

fn independent_corpus(seed: u64) -> SynthConfig {
    SynthConfig {
        num_samples: 3000,
        num_classes: 2,
        class_prior: None,
        lf_specs: [0.2, 0.3, 0.4, 0.35, 0.25]
            .iter()
            .map(|&ab| LfSpec::new(0.85, ab).with_hard_accuracy(0.55))
            .collect(),
        hard_fraction: 0.3,
        seed,
    }
}

#[test]
fn duplicated_lf_gets_inflated_weight() {
    // LF 0 and its duplicate LF 1 have the same true accuracy as LF 2.
    let cfg = SynthConfig {
        num_samples: 3000,
        num_classes: 2,
        class_prior: None,
        lf_specs: vec![
            LfSpec::new(0.7, 0.1),
            LfSpec::duplicate(0),
            LfSpec::new(0.7, 0.1),
            LfSpec::new(0.75, 0.1),
            LfSpec::new(0.65, 0.1),
        ],
        hard_fraction: 0.0,
        seed: 21,
    };
    let c = generate(&cfg).unwrap();
    let w = fit_generative_weights::<f64>(&c.matrix, 100, 1e-6).unwrap();
    let (dup0, dup1, indep) = (w.weight(1, 0), w.weight(1, 1), w.weight(1, 2));
    assert!((dup0 - dup1).abs() < 0.2 * dup0, "duplicates {dup0} vs {dup1}");
    assert!(dup0.min(dup1) > indep, "duplicate {dup0} should exceed independent {indep}");
}

#[test]
fn default_pipeline_on_duplicated_corpus_is_valid() {
    let c = generate(&SynthConfig::duplicated_triples(1)).unwrap();
    let out = run_pipeline::<f64>(&c.matrix, Some(&c.truth), &PipelineConfig::default()).unwrap();
    let r = out.report.unwrap();
    assert_eq!(r.verdict, ValidityVerdict::ValidAdversarial);
    assert_eq!(r.accuracies.len(), 10);
    assert_eq!(out.curated.prefix_lengths, (1..=10).map(|i| i * 500).collect::<Vec<_>>());
    assert!(out.curated.scores.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn skipping_pruning_is_more_optimistic() {
    let c = generate(&SynthConfig::duplicated_triples(2)).unwrap();
    let pruned = label_stage::<f64>(&c.matrix, &PipelineConfig::default()).unwrap();
    let all = label_stage::<f64>(
        &c.matrix,
        &PipelineConfig {
            skip_pruning: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(all.lfs.len(), 12);
    assert!(pruned.lfs.len() < 12);
    assert!(all.mean_confidence() > pruned.mean_confidence());
}

#[test]
fn both_labelers_produce_valid_manifests() {
    let c = generate(&SynthConfig::duplicated_triples(3)).unwrap();
    for labeler in [LabelerKind::MajorityVote, LabelerKind::Generative] {
        let cfg = PipelineConfig {
            labeler,
            ..Default::default()
        };
        let out = run_pipeline::<f64>(&c.matrix, None, &cfg).unwrap();
        assert_eq!(out.labeled.weights.method(), labeler);
        assert_eq!(out.curated.ordering.len(), 5000);
        assert!(out.report.is_none());
    }
}

#[test]
fn comparatives_on_duplicated_corpus() {
    let c = generate(&SynthConfig::duplicated_triples(4)).unwrap();
    let table = run_comparatives::<f64>(&c.matrix, &c.truth, &PipelineConfig::default()).unwrap();
    assert_eq!(table.num_datasets, 10);
    assert_eq!(table.cells.len(), 4);
    assert!(table.cells.iter().all(|cell| cell.accuracies.len() == 10));
    let full = table.full_approach();
    assert_eq!(full.verdict, ValidityVerdict::ValidAdversarial);
    assert!(!(full.rho > 0.0 && full.p_value <= 0.05));
    assert_eq!(table.cell(OrderingKey::LowerBound, true).num_lfs, 12);
}

#[test]
fn comparatives_without_dependencies_coincide() {
    let c = generate(&independent_corpus(5)).unwrap();
    let table = run_comparatives::<f64>(&c.matrix, &c.truth, &PipelineConfig::default()).unwrap();
    for key in [OrderingKey::Confidence, OrderingKey::LowerBound] {
        let all = table.cell(key, true);
        let indep = table.cell(key, false);
        assert_eq!(all.num_lfs, 5);
        assert_eq!(indep.num_lfs, 5);
        assert_eq!(all.accuracies, indep.accuracies);
        assert_eq!((all.rho, all.p_value, all.verdict), (indep.rho, indep.p_value, indep.verdict));
    }
}

#[test]
fn pipeline_is_deterministic() {
    let c = generate(&SynthConfig::duplicated_triples(6)).unwrap();
    let cfg = PipelineConfig::default();
    let a = run_pipeline::<f64>(&c.matrix, Some(&c.truth), &cfg).unwrap();
    let b = run_pipeline::<f64>(&c.matrix, Some(&c.truth), &cfg).unwrap();
    assert_eq!(a.curated, b.curated);
    assert_eq!(a.report, b.report);
}

#[test]
fn f32_pipeline_matches_f64_verdict() {
    let c = generate(&SynthConfig::duplicated_triples(0)).unwrap();
    let cfg = PipelineConfig::default();
    let r64 = run_pipeline::<f64>(&c.matrix, Some(&c.truth), &cfg).unwrap().report.unwrap();
    let r32 = run_pipeline::<f32>(&c.matrix, Some(&c.truth), &cfg).unwrap().report.unwrap();
    assert_eq!(r64.verdict, r32.verdict);
    assert!((r64.rho - r32.rho as f64).abs() < 0.1);
}
