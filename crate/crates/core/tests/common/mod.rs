//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use dissim_select::classifier::FeatureMask;
use dissim_select::metrics::{ScoredTrial, Truth};
use dissim_select::optimizer::{EvalSet, FitnessContext};

/// EER by exhaustive sweep over thresholds placed below the lowest score,
/// at every midpoint between adjacent distinct scores, and above the highest,
/// counting rejections and acceptances by brute force at each threshold.
pub fn sweep_eer(genuine: &[f64], skilled: &[f64]) -> f64 {
    let mut scores: Vec<f64> = genuine.iter().chain(skilled).copied().collect();
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scores.dedup();
    let mut thresholds = vec![scores[0] - 1.0];
    thresholds.extend(scores.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    thresholds.push(scores[scores.len() - 1] + 1.0);

    let rates: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&t| {
            let frr = genuine.iter().filter(|&&g| g < t).count() as f64 / genuine.len() as f64;
            let far = skilled.iter().filter(|&&s| s >= t).count() as f64 / skilled.len() as f64;
            (far, frr)
        })
        .collect();
    let i = rates.iter().position(|&(far, frr)| frr >= far).unwrap();
    let (far, frr) = rates[i];
    if far == frr || i == 0 {
        return far.max(frr);
    }
    let (pfar, pfrr) = rates[i - 1];
    let before = pfar - pfrr;
    let after = frr - far;
    let alpha = before / (before + after);
    pfrr + alpha * (frr - pfrr)
}

pub fn split_truth(trials: &[ScoredTrial]) -> (Vec<f64>, Vec<f64>) {
    let g = trials.iter().filter(|t| t.truth == Truth::Genuine).map(|t| t.score).collect();
    let s = trials.iter().filter(|t| t.truth == Truth::Skilled).map(|t| t.score).collect();
    (g, s)
}

/// Mean of per-writer sweep EERs.
pub fn sweep_user_eer(trials: &[ScoredTrial]) -> f64 {
    let mut writers: Vec<_> = trials.iter().map(|t| t.writer).collect();
    writers.sort();
    writers.dedup();
    let total: f64 = writers
        .iter()
        .map(|w| {
            let mine: Vec<ScoredTrial> = trials.iter().filter(|t| t.writer == *w).copied().collect();
            let (g, s) = split_truth(&mine);
            sweep_eer(&g, &s)
        })
        .sum();
    total / writers.len() as f64
}

/// Best Opt-fitness over every nonempty mask of a small dimension,
/// evaluated without the fitness cache.
pub fn enumerate_optimum(ctx: &FitnessContext, dim: usize) -> (f64, FeatureMask) {
    assert!(dim <= 16);
    (1u32..(1 << dim))
        .map(|code| {
            let mask = FeatureMask::from_bits((0..dim).map(|i| code & (1 << i) != 0).collect());
            (ctx.fitness_uncached(&mask, EvalSet::Opt).unwrap(), mask)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}

/// Brute-force 1-NN label of `query` among `points`; ties to the lowest index.
pub fn nearest<L: Copy>(points: &[(Vec<f64>, L)], query: &[f64]) -> L {
    let mut best = (f64::INFINITY, 0usize);
    for (i, (p, _)) in points.iter().enumerate() {
        let d: f64 = p.iter().zip(query).map(|(a, b)| (a - b).powi(2)).sum();
        if d < best.0 {
            best = (d, i);
        }
    }
    points[best.1].1
}

/// A small end-to-end fitness context: synthetic writers, condensed training
/// pairs, and disjoint Opt and Sel writers.
pub fn toy_context(dim: usize, informative: usize, seed: u64) -> FitnessContext {
    use dissim_select::classifier::SvmParams;
    use dissim_select::condense::condense;
    use dissim_select::data::{split_writers, SplitCounts};
    use dissim_select::dichotomy::{build_training_set, EvaluationPlan, TrainingPlan};
    use dissim_select::synthetic::{generate, GeneratorConfig};
    use std::collections::BTreeSet;

    let ds = generate(&GeneratorConfig {
        n_writers: 24,
        dim,
        informative_dims: informative,
        seed,
        ..GeneratorConfig::default()
    })
    .unwrap();
    let counts = SplitCounts { train: 12, validation: 0, opt: 6, sel: 6 };
    let split = split_writers(&ds, &BTreeSet::new(), counts, seed).unwrap();
    let plan = TrainingPlan { references: 6, genuine: 5, random_forgery: 5 };
    let training = build_training_set(&ds, &split.train, plan, seed).unwrap();
    let condensed = condense(&training, seed).unwrap();
    let eval = EvaluationPlan { references: 6, genuine: 5, skilled: 5 };
    FitnessContext::from_dataset(
        &ds,
        condensed,
        &split.opt,
        &split.sel,
        eval,
        SvmParams { seed, ..SvmParams::default() },
        seed,
    )
    .unwrap()
}
