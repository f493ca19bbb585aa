//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use natcurate::curation::{curate, order_samples};
use natcurate::intervals::{clopper_pearson, ConfidenceInterval};
use natcurate::labeling::{fit_generative_weights, label_from_scores, softmax};
use natcurate::pipeline::run_pipeline;
use natcurate::pruning::{maximal_cliques, prune};
use natcurate::DependencyGraph;
use natcurate::synth::{generate, LfSpec, SynthConfig};
use natcurate::validation::{spearman, spearman_p_value};
use natcurate::{PipelineConfig, ValidityVerdict};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// C1: Spearman p-values for the published (rho, p) pairs at N = 10.
fn spearman_cross_check() -> Outcome {
    let mut details = Vec::new();
    for (rho, want) in [(-0.730f64, 0.017), (-0.673, 0.033)] {
        let p = spearman_p_value(rho, 10).map_err(|e| e.to_string())?;
        ensure((p - want).abs() <= 1e-3, format!("rho={rho}: p={p:.5}, expected {want} ± 0.001"))?;
        details.push(format!("rho={rho} -> p={p:.4}"));
    }
    Ok(details.join(", "))
}

fn binomial_coefficient(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// P(X >= s) for X ~ Bin(n, mu), by direct summation.
fn upper_tail(n: u32, s: u32, mu: f64) -> f64 {
    (s..=n)
        .map(|k| binomial_coefficient(n, k) * mu.powi(k as i32) * (1.0 - mu).powi((n - k) as i32))
        .sum()
}

/// Root of a monotone function on [0, 1] by bisection.
fn bisect(f: impl Fn(f64) -> f64, increasing: bool) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// C2: Clopper-Pearson bounds equal brute-force inversion of the binomial CDF.
fn cp_oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for alpha in [0.05, 0.10] {
        for n in 0..=30u32 {
            for s in 0..=n {
                let ci = clopper_pearson(n as usize, s as f64, alpha).map_err(|e| e.to_string())?;
                // lower: P(X >= s | mu) = alpha/2, increasing in mu
                let lower = if s == 0 {
                    0.0
                } else {
                    bisect(|mu| upper_tail(n, s, mu) - alpha / 2.0, true)
                };
                // upper: P(X <= s | mu) = alpha/2, decreasing in mu
                let upper = if s == n {
                    1.0
                } else {
                    bisect(|mu| (1.0 - upper_tail(n, s + 1, mu)) - alpha / 2.0, false)
                };
                let err = (ci.lower - lower).abs().max((ci.upper - upper).abs());
                worst = worst.max(err);
                ensure(
                    err <= 1e-6,
                    format!("n={n} s={s} alpha={alpha}: [{}, {}] vs oracle [{lower}, {upper}]", ci.lower, ci.upper),
                )?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases, max |error| = {worst:.2e}"))
}

/// C3: Monte-Carlo coverage of the interval is at least 1 - alpha in every cell.
fn cp_coverage() -> Outcome {
    let alpha = 0.05;
    let trials = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut worst = 1.0f64;
    for n in [5usize, 10, 20] {
        let table: Vec<ConfidenceInterval<f64>> = (0..=n)
            .map(|s| clopper_pearson(n, s as f64, alpha))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for step in 1..=9 {
            let mu = step as f64 / 10.0;
            let covered = (0..trials)
                .filter(|_| {
                    let s = (0..n).filter(|_| rng.gen_bool(mu)).count();
                    table[s].contains(mu)
                })
                .count();
            let coverage = covered as f64 / trials as f64;
            worst = worst.min(coverage);
            ensure(coverage >= 1.0 - alpha, format!("n={n} mu={mu}: coverage {coverage}"))?;
        }
    }
    Ok(format!("27 cells x {trials} trials, min coverage {worst:.4}"))
}

fn brute_force_cliques(g: &DependencyGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let is_clique = members.iter().all(|&a| members.iter().all(|&b| a == b || g.has_edge(a, b)));
        let extendable = (0..n)
            .filter(|&v| mask & (1 << v) == 0)
            .any(|v| members.iter().all(|&a| g.has_edge(a, v)));
        if is_clique && !extendable {
            out.push(members);
        }
    }
    out.sort();
    out
}

/// C4: maximal cliques equal exhaustive enumeration on 500 random graphs.
fn clique_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut total_cliques = 0;
    for trial in 0..500 {
        let v = rng.gen_range(1..=10usize);
        let density: f64 = rng.gen_range(0.05..0.95);
        let mut edges = Vec::new();
        for i in 0..v {
            for j in (i + 1)..v {
                if rng.gen_bool(density) {
                    edges.push((i, j));
                }
            }
        }
        let g = DependencyGraph::from_edges(v, edges, 0.5).map_err(|e| e.to_string())?;
        let got = maximal_cliques(&g);
        ensure(got == brute_force_cliques(&g), format!("graph #{trial} (V={v}) disagrees"))?;
        total_cliques += got.len();
    }
    Ok(format!("500 graphs, {total_cliques} maximal cliques"))
}

/// C5: the full pipeline yields a valid adversarial ordering, and never a
/// significant increasing trend across 20 seeds.
fn end_to_end_ordering() -> Outcome {
    let cfg = PipelineConfig::default();
    let corpus = generate(&SynthConfig::duplicated_triples(0)).map_err(|e| e.to_string())?;
    let out = run_pipeline::<f64>(&corpus.matrix, Some(&corpus.truth), &cfg).map_err(|e| e.to_string())?;
    let report = out.report.expect("truth supplied");
    ensure(
        report.verdict == ValidityVerdict::ValidAdversarial && report.rho <= -0.7,
        format!("seed 0: rho={:.3} p={:.4} verdict={:?}", report.rho, report.p_value, report.verdict),
    )?;
    let mut rhos = Vec::new();
    for seed in 0..20u64 {
        let corpus = generate(&SynthConfig::duplicated_triples(seed)).map_err(|e| e.to_string())?;
        let out = run_pipeline::<f64>(&corpus.matrix, Some(&corpus.truth), &cfg).map_err(|e| e.to_string())?;
        let r = out.report.expect("truth supplied");
        ensure(
            !(r.rho > 0.0 && r.p_value <= cfg.gamma),
            format!("seed {seed}: significant increasing trend rho={:.3} p={:.4}", r.rho, r.p_value),
        )?;
        rhos.push(r.rho);
    }
    let max_rho = rhos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "seed 0 rho={:.3} p={:.2e}; 20 seeds max rho={max_rho:.3}",
        report.rho, report.p_value
    ))
}

/// C6: pruning removes most duplicated-triple members and leaves an
/// edge-free, stable survivor set.
fn pruning_efficacy() -> Outcome {
    let corpus = generate(&SynthConfig::duplicated_triples(0)).map_err(|e| e.to_string())?;
    let p = prune::<f64>(&corpus.matrix, 0.5).map_err(|e| e.to_string())?;
    let removed_triple = (0..6).filter(|i| !p.kept.contains(i)).count();
    ensure(removed_triple >= 4, format!("only {removed_triple} triple members removed; kept {:?}", p.kept))?;
    for &a in &p.kept {
        for &b in &p.kept {
            ensure(!p.graph.has_edge(a, b), format!("survivors {a} and {b} share an edge"))?;
        }
    }
    let restricted = corpus.matrix.restrict(&p.kept).map_err(|e| e.to_string())?;
    let again = prune::<f64>(&restricted, 0.5).map_err(|e| e.to_string())?;
    ensure(again.kept == (0..p.kept.len()).collect::<Vec<_>>(), "re-pruning removed labeling functions")?;
    Ok(format!("removed {removed_triple}/6 triple members, kept {:?}", p.kept))
}

/// C7: EM recovers planted labeling-function accuracies.
fn generative_recovery() -> Outcome {
    let truth = [0.9, 0.8, 0.7, 0.6, 0.55];
    let cfg = SynthConfig {
        num_samples: 2000,
        num_classes: 2,
        class_prior: None,
        lf_specs: truth.iter().map(|&a| LfSpec::new(a, 0.0)).collect(),
        hard_fraction: 0.0,
        seed: 7,
    };
    let corpus = generate(&cfg).map_err(|e| e.to_string())?;
    let w = fit_generative_weights::<f64>(&corpus.matrix, 100, 1e-6).map_err(|e| e.to_string())?;
    let est = w.accuracies().expect("generative fit reports accuracies");
    for (i, (&a, &t)) in est.iter().zip(&truth).enumerate() {
        ensure((a - t).abs() <= 0.05, format!("lf {i}: estimated {a:.3}, planted {t}"))?;
    }
    let shown: Vec<String> = est.iter().map(|a| format!("{a:.3}")).collect();
    Ok(format!("estimates [{}]", shown.join(", ")))
}

/// C8: invariant suites, each with at least 200 randomized cases.
fn invariant_suites() -> Outcome {
    const CASES: u32 = 256;
    let run = |name: &str, f: &dyn Fn(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new(Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        });
        f(&mut runner).map_err(|e| format!("{name}: {e}"))
    };

    run("softmax shift/argmax invariance", &|r| {
        r.run(
            &(proptest::collection::vec(0.0f64..10.0, 2..6), -30.0f64..30.0, 0.05f64..20.0),
            |(scores, shift, factor)| {
                let base = label_from_scores(&scores, 1);
                let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
                let sh = label_from_scores(&shifted, 1);
                prop_assert_eq!(base.label, sh.label);
                prop_assert!((base.confidence - sh.confidence).abs() < 1e-12);
                let total: f64 = softmax(&scores).iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                let scaled: Vec<f64> = scores.iter().map(|s| s * factor).collect();
                prop_assert_eq!(label_from_scores(&scaled, 1).label, base.label);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
    })?;

    run("interval nesting in alpha", &|r| {
        r.run(&(1usize..80, 0.0f64..=1.0, 0.001f64..0.5, 0.001f64..0.5), |(n, frac, a1, a2)| {
            let s = frac * n as f64;
            let (lo_a, hi_a) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let wide = clopper_pearson(n, s, lo_a).unwrap();
            let narrow = clopper_pearson(n, s, hi_a).unwrap();
            prop_assert!(wide.lower <= narrow.lower + 1e-12);
            prop_assert!(wide.upper >= narrow.upper - 1e-12);
            Ok(())
        })
        .map_err(|e| e.to_string())
    })?;

    run("curation nesting and monotone lower bound", &|r| {
        r.run(&(proptest::collection::vec(0.0f64..1.0, 1..120), 0.0f64..1.0), |(lows, frac)| {
            let total = lows.len();
            let n = 1 + ((total - 1) as f64 * frac) as usize;
            let cis: Vec<ConfidenceInterval<f64>> = lows
                .iter()
                .map(|&l| ConfidenceInterval {
                    lower: l,
                    upper: 1.0,
                    n: 1,
                    s: 1.0,
                    alpha: 0.05,
                })
                .collect();
            let ord = order_samples(&cis).unwrap();
            let seq = curate(&ord, &vec![1; total], &lows, n).unwrap();
            prop_assert!(seq.scores.windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(*seq.prefix_lengths.last().unwrap(), total);
            prop_assert!(seq.prefix_lengths.windows(2).all(|w| w[0] < w[1]));
            for d in 1..n {
                let next = seq.dataset(d + 1);
                prop_assert!(seq.dataset(d).iter().all(|i| next.contains(i)));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    })?;

    run("spearman reversal antisymmetry and monotone invariance", &|r| {
        r.run(&proptest::collection::hash_set(0u32..10_000, 3..20), |set| {
            let values: Vec<f64> = set.into_iter().map(|v| v as f64 / 10_000.0).collect();
            let fwd = spearman(&values).unwrap();
            let rev: Vec<f64> = values.iter().rev().copied().collect();
            prop_assert!((spearman(&rev).unwrap().rho + fwd.rho).abs() < 1e-12);
            let transformed: Vec<f64> = values.iter().map(|v| (3.0 * v).exp() + v.powi(3)).collect();
            prop_assert!((spearman(&transformed).unwrap().rho - fwd.rho).abs() < 1e-12);
            Ok(())
        })
        .map_err(|e| e.to_string())
    })?;

    Ok(format!("4 suites x {CASES} cases"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("C1 spearman p-value cross-check", spearman_cross_check),
        ("C2 clopper-pearson oracle equivalence", cp_oracle_equivalence),
        ("C3 clopper-pearson coverage", cp_coverage),
        ("C4 maximal clique oracle", clique_oracle),
        ("C5 end-to-end adversarial ordering", end_to_end_ordering),
        ("C6 pruning efficacy", pruning_efficacy),
        ("C7 generative weight recovery", generative_recovery),
        ("C8 invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
