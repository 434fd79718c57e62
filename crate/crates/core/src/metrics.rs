//! False acceptance / false rejection rates and the equal error rate.
//!
//! A trial is accepted iff its score is at or above the threshold. The sweep
//! visits every distinct score plus a terminal point above the highest score,
//! so FRR rises from 0 to 1 and FAR falls from 1 to 0 and the two curves
//! always cross. Where they cross between sweep points the EER is read off
//! the straight line joining them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::WriterId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    Genuine,
    Skilled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredTrial {
    pub writer: WriterId,
    pub truth: Truth,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    Global(f64),
    PerWriter(BTreeMap<WriterId, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EerResult {
    pub eer: f64,
    pub threshold: Threshold,
}

/// One point of the FAR/FRR sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

/// The FAR/FRR sweep over all distinct scores, ascending, followed by the
/// terminal reject-all point.
pub fn operating_points(trials: &[ScoredTrial]) -> Result<Vec<OperatingPoint>> {
    let mut genuine: Vec<f64> = Vec::new();
    let mut skilled: Vec<f64> = Vec::new();
    for t in trials {
        if !t.score.is_finite() {
            return Err(Error::Metric(format!("writer {}: non-finite score", t.writer)));
        }
        match t.truth {
            Truth::Genuine => genuine.push(t.score),
            Truth::Skilled => skilled.push(t.score),
        }
    }
    if genuine.is_empty() || skilled.is_empty() {
        return Err(Error::Metric("EER needs at least one genuine and one skilled-forgery trial".into()));
    }
    genuine.sort_by(f64::total_cmp);
    skilled.sort_by(f64::total_cmp);
    let mut thresholds: Vec<f64> = genuine.iter().chain(&skilled).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let (ng, ns) = (genuine.len() as f64, skilled.len() as f64);
    // Two-pointer walk: below_g / below_s count scores strictly below t.
    let (mut below_g, mut below_s) = (0usize, 0usize);
    let mut points = Vec::with_capacity(thresholds.len() + 1);
    for &t in &thresholds {
        while below_g < genuine.len() && genuine[below_g] < t {
            below_g += 1;
        }
        while below_s < skilled.len() && skilled[below_s] < t {
            below_s += 1;
        }
        points.push(OperatingPoint {
            threshold: t,
            far: (skilled.len() - below_s) as f64 / ns,
            frr: below_g as f64 / ng,
        });
    }
    let top = *thresholds.last().expect("nonempty");
    points.push(OperatingPoint { threshold: top + top.abs().max(1.0), far: 0.0, frr: 1.0 });
    Ok(points)
}

/// Equal error rate and its threshold from a FAR/FRR sweep.
pub fn crossing(points: &[OperatingPoint]) -> (f64, f64) {
    let i = points.iter().position(|p| p.frr >= p.far).expect("sweep ends with FRR = 1 > FAR = 0");
    let p = points[i];
    if p.frr == p.far || i == 0 {
        return (p.frr.max(p.far), p.threshold);
    }
    let q = points[i - 1];
    let gap_before = q.far - q.frr;
    let gap_after = p.frr - p.far;
    let alpha = gap_before / (gap_before + gap_after);
    let eer = q.frr + alpha * (p.frr - q.frr);
    let threshold = q.threshold + alpha * (p.threshold - q.threshold);
    (eer, threshold)
}

/// EER with a single threshold shared by all trials.
pub fn eer_global(trials: &[ScoredTrial]) -> Result<EerResult> {
    let (eer, threshold) = crossing(&operating_points(trials)?);
    Ok(EerResult { eer, threshold: Threshold::Global(threshold) })
}

/// User-threshold EER: the unweighted mean of per-writer EERs.
pub fn eer_user(trials: &[ScoredTrial]) -> Result<EerResult> {
    let mut by_writer: BTreeMap<WriterId, Vec<ScoredTrial>> = BTreeMap::new();
    for t in trials {
        by_writer.entry(t.writer).or_default().push(*t);
    }
    if by_writer.is_empty() {
        return Err(Error::Metric("no trials to evaluate".into()));
    }
    let mut thresholds = BTreeMap::new();
    let mut total = 0.0;
    for (writer, ts) in &by_writer {
        let r = eer_global(ts).map_err(|e| match e {
            Error::Metric(m) => Error::Metric(format!("writer {writer}: {m}")),
            other => other,
        })?;
        total += r.eer;
        if let Threshold::Global(t) = r.threshold {
            thresholds.insert(*writer, t);
        }
    }
    Ok(EerResult { eer: total / by_writer.len() as f64, threshold: Threshold::PerWriter(thresholds) })
}
