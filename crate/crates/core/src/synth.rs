//! Seeded synthetic corpora with planted labeling-function accuracies,
//! duplicated labeling functions and a hard stratum of samples.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, so a given
//! configuration reproduces the same corpus on every platform. Draw order is
//! fixed: for each sample, the class, then the hard flag, then each labeling
//! function in column order.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label_matrix::{GroundTruth, LabelMatrix, Verdict, ABSTAIN};

/// Probability that a duplicate deviates from its parent on a given sample.
pub const DUPLICATE_FLIP_RATE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub accuracy: f64,
    #[serde(default)]
    pub abstain_rate: f64,
    /// Copies an earlier labeling function (with flip noise) instead of voting independently.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<usize>,
    /// Accuracy on hard samples; defaults to `accuracy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hard_stratum_accuracy: Option<f64>,
}

impl LfSpec {
    pub fn new(accuracy: f64, abstain_rate: f64) -> Self {
        Self {
            name: None,
            accuracy,
            abstain_rate,
            duplicate_of: None,
            hard_stratum_accuracy: None,
        }
    }

    pub fn with_hard_accuracy(mut self, acc: f64) -> Self {
        self.hard_stratum_accuracy = Some(acc);
        self
    }

    pub fn duplicate(parent: usize) -> Self {
        Self {
            duplicate_of: Some(parent),
            ..Self::new(0.5, 0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_samples: usize,
    pub num_classes: u32,
    /// Class prior; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_prior: Option<Vec<f64>>,
    pub lf_specs: Vec<LfSpec>,
    #[serde(default)]
    pub hard_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SynthConfig {
    /// 5000 samples, two classes, twelve labeling functions of which two
    /// triples are duplicates (columns 0-2 and 3-5), and a 30% hard stratum on
    /// which every labeling function drops from 0.9 to 0.55 accuracy.
    pub fn duplicated_triples(seed: u64) -> Self {
        let abstain = [0.15, 0.25, 0.35, 0.2, 0.3, 0.4];
        let mut lf_specs = Vec::with_capacity(12);
        for parent in [0usize, 3] {
            lf_specs.push(LfSpec::new(0.9, abstain[parent]).with_hard_accuracy(0.55));
            lf_specs.push(LfSpec::duplicate(parent));
            lf_specs.push(LfSpec::duplicate(parent));
        }
        for &rate in &abstain {
            lf_specs.push(LfSpec::new(0.9, rate).with_hard_accuracy(0.55));
        }
        Self {
            num_samples: 5000,
            num_classes: 2,
            class_prior: None,
            lf_specs,
            hard_fraction: 0.3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.num_samples == 0 {
            return bad("num_samples must be positive".into());
        }
        if self.num_classes < 2 {
            return bad("num_classes must be at least 2".into());
        }
        if self.lf_specs.is_empty() {
            return bad("at least one labeling function spec is required".into());
        }
        if let Some(prior) = &self.class_prior {
            if prior.len() != self.num_classes as usize {
                return bad(format!("class_prior has {} entries, expected {}", prior.len(), self.num_classes));
            }
            if prior.iter().any(|&p| !(p >= 0.0 && p.is_finite())) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad("class_prior must be non-negative and sum to 1".into());
            }
        }
        if !(0.0..=1.0).contains(&self.hard_fraction) {
            return bad(format!("hard_fraction {} outside [0, 1]", self.hard_fraction));
        }
        let open = |p: f64| p > 0.0 && p < 1.0;
        for (i, spec) in self.lf_specs.iter().enumerate() {
            if let Some(parent) = spec.duplicate_of {
                if parent >= i {
                    return bad(format!("lf {i}: duplicate_of must reference an earlier spec, got {parent}"));
                }
                continue;
            }
            if !open(spec.accuracy) {
                return bad(format!("lf {i}: accuracy {} outside (0, 1)", spec.accuracy));
            }
            if spec.hard_stratum_accuracy.is_some_and(|a| !open(a)) {
                return bad(format!("lf {i}: hard_stratum_accuracy outside (0, 1)"));
            }
            if !(0.0..1.0).contains(&spec.abstain_rate) {
                return bad(format!("lf {i}: abstain_rate {} outside [0, 1)", spec.abstain_rate));
            }
        }
        Ok(())
    }

    fn lf_names(&self) -> Result<Vec<String>> {
        Ok(self
            .lf_specs
            .iter()
            .enumerate()
            .map(|(i, s)| match (&s.name, s.duplicate_of) {
                (Some(n), _) => n.clone(),
                (None, Some(p)) => format!("lf_{i:02}_dup_{p:02}"),
                (None, None) => format!("lf_{i:02}"),
            })
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub matrix: LabelMatrix,
    pub truth: GroundTruth,
    pub hard_mask: Vec<bool>,
}

fn wrong_label<R: Rng>(rng: &mut R, truth: Verdict, k: u32) -> Verdict {
    // Uniform over the K-1 classes other than `truth`.
    let v = rng.gen_range(1..k);
    if v >= truth {
        v + 1
    } else {
        v
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let k = cfg.num_classes;
    let num_lfs = cfg.lf_specs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let prior = cfg
        .class_prior
        .clone()
        .unwrap_or_else(|| vec![1.0 / k as f64; k as usize]);
    let classes = WeightedIndex::new(&prior).map_err(|e| Error::Config(format!("class_prior: {e}")))?;

    let mut truth = Vec::with_capacity(cfg.num_samples);
    let mut hard_mask = Vec::with_capacity(cfg.num_samples);
    let mut entries = Vec::with_capacity(cfg.num_samples * num_lfs);
    for _ in 0..cfg.num_samples {
        let y = classes.sample(&mut rng) as Verdict + 1;
        let hard = rng.gen_bool(cfg.hard_fraction);
        let row_start = entries.len();
        for spec in &cfg.lf_specs {
            let v = match spec.duplicate_of {
                Some(parent) => {
                    let base = entries[row_start + parent];
                    if rng.gen_bool(DUPLICATE_FLIP_RATE) {
                        // Any other value in {0, ..., K}.
                        let other = rng.gen_range(0..k);
                        if other >= base {
                            other + 1
                        } else {
                            other
                        }
                    } else {
                        base
                    }
                }
                None => {
                    if rng.gen_bool(spec.abstain_rate) {
                        ABSTAIN
                    } else {
                        let acc = match spec.hard_stratum_accuracy {
                            Some(h) if hard => h,
                            _ => spec.accuracy,
                        };
                        if rng.gen_bool(acc) {
                            y
                        } else {
                            wrong_label(&mut rng, y, k)
                        }
                    }
                }
            };
            entries.push(v);
        }
        truth.push(y);
        hard_mask.push(hard);
    }

    let matrix = LabelMatrix::from_flat(cfg.lf_names()?, Some(k), cfg.num_samples, entries)?;
    let truth = GroundTruth::for_matrix(truth, &matrix)?;
    Ok(SynthCorpus {
        matrix,
        truth,
        hard_mask,
    })
}
