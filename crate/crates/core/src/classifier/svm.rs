//! Linear soft-margin SVM trained by dual coordinate descent.
//!
//! Minimises `0.5 * (|w|^2 + b^2) + C * sum_i max(0, 1 - y_i (w . x_i + b))`
//! with the bias folded in as a constant unit feature. One coordinate of the
//! dual is updated at a time in a seeded per-epoch order; training stops when
//! the spread of projected gradients drops below `tolerance` or after
//! `max_epochs` passes.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::FeatureMask;
use crate::condense::CondensedSet;
use crate::dichotomy::{fuse_scores, PairLabel, ReferenceSet};
use crate::error::{Error, Result};
use crate::rng::{self, tag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Regularisation constant C.
    pub c: f64,
    pub tolerance: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 1.0, tolerance: 1e-3, max_epochs: 1000, seed: 0 }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Config(format!("SVM C must be positive, got {}", self.c)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) || self.max_epochs == 0 {
            return Err(Error::Config("SVM tolerance and max_epochs must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs: usize,
    pub converged: bool,
    /// Primal objective at the returned solution.
    pub objective: f64,
}

/// A linear model over the selected dimensions. Scores are higher for
/// same-writer (positive) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub mask: FeatureMask,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: SvmParams,
    pub meta: TrainingMeta,
}

impl TrainedModel {
    /// Score of a full-width dissimilarity vector.
    pub fn decision(&self, dissimilarity: &[f64]) -> f64 {
        self.mask.selected().zip(&self.weights).map(|(i, w)| w * dissimilarity[i]).sum::<f64>() + self.bias
    }

    /// Max-fused score of `questioned` against every reference in `refs`.
    pub fn score(&self, questioned: &[f64], refs: &ReferenceSet) -> Result<f64> {
        if questioned.len() != self.mask.dim() {
            return Err(Error::Dimension { expected: self.mask.dim(), actual: questioned.len() });
        }
        let partial = refs.dissimilarities(questioned)?.iter().map(|u| self.decision(u)).collect::<Vec<_>>();
        fuse_scores(&partial)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TrainedModel = serde_json::from_str(text)?;
        if model.weights.len() != model.mask.cardinality() {
            return Err(Error::Schema(format!(
                "model has {} weights for {} selected dimensions",
                model.weights.len(),
                model.mask.cardinality()
            )));
        }
        Ok(model)
    }
}

pub fn train(samples: &CondensedSet, mask: &FeatureMask, hyper: &SvmParams) -> Result<TrainedModel> {
    hyper.validate()?;
    if mask.cardinality() == 0 {
        return Err(Error::DegenerateMask);
    }
    let samples = samples.samples();
    if let Some(s) = samples.iter().find(|s| s.values.len() != mask.dim()) {
        return Err(Error::Dimension { expected: mask.dim(), actual: s.values.len() });
    }
    let has = |l| samples.iter().any(|s| s.label() == l);
    if !has(PairLabel::Positive) || !has(PairLabel::Negative) {
        return Err(Error::Data("SVM training needs both positive and negative samples".into()));
    }

    let d = mask.cardinality();
    let n = samples.len();
    let selected: Vec<usize> = mask.selected().collect();
    let mut x = Vec::with_capacity(n * d);
    for s in samples {
        x.extend(selected.iter().map(|&i| s.values[i]));
    }
    let y: Vec<f64> = samples.iter().map(|s| if s.label() == PairLabel::Positive { 1.0 } else { -1.0 }).collect();
    let diag: Vec<f64> = x.chunks_exact(d).map(|row| row.iter().map(|v| v * v).sum::<f64>() + 1.0).collect();

    let c = hyper.c;
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng::stream(hyper.seed, &[tag::CLASSIFIER]);
    let mut epochs = 0;
    let mut converged = false;

    while epochs < hyper.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;
        for &i in &order {
            let row = &x[i * d..(i + 1) * d];
            let margin = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b;
            let g = y[i] * margin - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                if step != 0.0 {
                    for (wj, xj) in w.iter_mut().zip(row) {
                        *wj += step * xj;
                    }
                    b += step;
                }
            }
        }
        if pg_max - pg_min < hyper.tolerance {
            converged = true;
            break;
        }
    }

    let hinge: f64 = x
        .chunks_exact(d)
        .zip(&y)
        .map(|(row, yi)| {
            let m = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b;
            (1.0 - yi * m).max(0.0)
        })
        .sum();
    let objective = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b) + c * hinge;

    Ok(TrainedModel {
        mask: mask.clone(),
        weights: w,
        bias: b,
        hyper: *hyper,
        meta: TrainingMeta { seed: hyper.seed, epochs, converged, objective },
    })
}
