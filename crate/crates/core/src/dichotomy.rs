//! The dichotomy transformation.
//!
//! A questioned signature `q` and a reference `r` of the claimed writer map to
//! the dissimilarity vector `u = |q - r|`. Same-writer genuine pairs form the
//! positive class; everything else is negative. A single two-class model over
//! these vectors serves every writer.

use std::collections::{BTreeSet, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, SignatureRecord, WriterId};
use crate::error::{Error, Result};
use crate::metrics::Truth;
use crate::rng::{self, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairLabel {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    GenuineVsRef,
    SkilledVsRef,
    RandomVsRef,
}

impl PairKind {
    pub fn label(self) -> PairLabel {
        match self {
            PairKind::GenuineVsRef => PairLabel::Positive,
            PairKind::SkilledVsRef | PairKind::RandomVsRef => PairLabel::Negative,
        }
    }
}

/// One labelled point of the dissimilarity space.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilaritySample {
    pub values: Vec<f64>,
    /// Writer whose reference was used.
    pub writer: WriterId,
    pub reference_index: usize,
    pub pair_kind: PairKind,
}

impl DissimilaritySample {
    pub fn label(&self) -> PairLabel {
        self.pair_kind.label()
    }
}

/// `|questioned - reference|`, elementwise.
pub fn dissimilarity(questioned: &[f64], reference: &[f64]) -> Result<Vec<f64>> {
    if questioned.len() != reference.len() {
        return Err(Error::Dimension { expected: reference.len(), actual: questioned.len() });
    }
    Ok(questioned.iter().zip(reference).map(|(q, r)| (q - r).abs()).collect())
}

/// Max fusion of per-reference scores.
pub fn fuse_scores(partial_scores: &[f64]) -> Result<f64> {
    partial_scores
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or_else(|| Error::Usage("cannot fuse an empty list of scores".into()))
}

/// The genuine references of one writer.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    writer: WriterId,
    references: Vec<SignatureRecord>,
}

impl ReferenceSet {
    pub fn new(writer: WriterId, references: Vec<SignatureRecord>) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::Usage(format!("writer {writer}: reference set is empty")));
        }
        if let Some(r) = references.iter().find(|r| r.writer != writer || r.label != Label::Genuine) {
            return Err(Error::Data(format!(
                "reference set of writer {writer} contains a {} of writer {}",
                r.label, r.writer
            )));
        }
        Ok(ReferenceSet { writer, references })
    }

    pub fn writer(&self) -> WriterId {
        self.writer
    }

    pub fn references(&self) -> &[SignatureRecord] {
        &self.references
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dissimilarity vectors of `questioned` against every reference.
    pub fn dissimilarities(&self, questioned: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.references.iter().map(|r| dissimilarity(questioned, &r.features)).collect()
    }
}

/// A writer's genuine signatures, shuffled once per seed: the first `R` are
/// references, the rest form the questioned pool.
struct GenuinePartition<'a> {
    references: Vec<&'a SignatureRecord>,
    questioned: Vec<&'a SignatureRecord>,
}

fn partition_genuines<'a>(
    dataset: &'a Dataset,
    writer: WriterId,
    n_references: usize,
    n_questioned: usize,
    seed: u64,
) -> Result<GenuinePartition<'a>> {
    let mut genuines: Vec<&SignatureRecord> = dataset.samples_of(writer, Label::Genuine).collect();
    let needed = n_references + n_questioned;
    if genuines.len() < needed {
        return Err(Error::InsufficientSamples { writer, label: Label::Genuine, needed, available: genuines.len() });
    }
    genuines.shuffle(&mut rng::stream(seed, &[tag::REFERENCES, u64::from(writer.0)]));
    let questioned = genuines[n_references..needed].to_vec();
    genuines.truncate(n_references);
    Ok(GenuinePartition { references: genuines, questioned })
}

/// The reference set of `writer` under `seed`; consistent with the references
/// used by [`build_training_set`] and [`build_evaluation_trials`].
pub fn reference_set(dataset: &Dataset, writer: WriterId, n_references: usize, seed: u64) -> Result<ReferenceSet> {
    if n_references == 0 {
        return Err(Error::Config("at least one reference per writer is required".into()));
    }
    let part = partition_genuines(dataset, writer, n_references, 0, seed)?;
    ReferenceSet::new(writer, part.references.into_iter().cloned().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPlan {
    pub references: usize,
    pub genuine: usize,
    pub random_forgery: usize,
}

impl Default for TrainingPlan {
    fn default() -> Self {
        TrainingPlan { references: 12, genuine: 10, random_forgery: 10 }
    }
}

/// Builds the dichotomy training set for `writers`.
///
/// Per writer, `plan.genuine` questioned genuines and `plan.random_forgery`
/// genuines of other writers in `writers` are each compared against the
/// writer's `plan.references` references. Output is grouped by writer in
/// ascending id order.
pub fn build_training_set(
    dataset: &Dataset,
    writers: &BTreeSet<WriterId>,
    plan: TrainingPlan,
    seed: u64,
) -> Result<Vec<DissimilaritySample>> {
    if plan.references == 0 {
        return Err(Error::Config("at least one reference per writer is required".into()));
    }
    let writer_list: Vec<WriterId> = writers.iter().copied().collect();
    let mut out = Vec::with_capacity(writers.len() * plan.references * (plan.genuine + plan.random_forgery));
    for &writer in &writer_list {
        let part = partition_genuines(dataset, writer, plan.references, plan.genuine, seed)?;
        let forgeries = draw_random_forgeries(dataset, writer, &writer_list, plan.random_forgery, seed)?;

        let questioned = part
            .questioned
            .iter()
            .map(|q| (*q, PairKind::GenuineVsRef))
            .chain(forgeries.into_iter().map(|q| (q, PairKind::RandomVsRef)));
        for (q, kind) in questioned {
            for (ri, r) in part.references.iter().enumerate() {
                out.push(DissimilaritySample {
                    values: dissimilarity(&q.features, &r.features)?,
                    writer,
                    reference_index: ri,
                    pair_kind: kind,
                });
            }
        }
    }
    Ok(out)
}

/// Genuine signatures of other writers, forging writer uniform among
/// `writers \ {target}`, without repeats.
fn draw_random_forgeries<'a>(
    dataset: &'a Dataset,
    target: WriterId,
    writers: &[WriterId],
    n: usize,
    seed: u64,
) -> Result<Vec<&'a SignatureRecord>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let others: Vec<WriterId> =
        writers.iter().copied().filter(|&w| w != target && dataset.count_of(w, Label::Genuine) > 0).collect();
    let available: usize = others.iter().map(|&w| dataset.count_of(w, Label::Genuine)).sum();
    if available < n {
        return Err(Error::Data(format!(
            "writer {target}: {n} random forgeries requested but other writers offer only {available} genuine signatures"
        )));
    }
    let mut rng = rng::stream(seed, &[tag::RANDOM_FORGERY, u64::from(target.0)]);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let &forger = others.choose(&mut rng).expect("others is nonempty");
        let pool: Vec<&SignatureRecord> = dataset.samples_of(forger, Label::Genuine).collect();
        let &pick = pool.choose(&mut rng).expect("forger has genuine samples");
        if seen.insert((forger, pick.sample_index)) {
            out.push(pick);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationPlan {
    pub references: usize,
    pub genuine: usize,
    pub skilled: usize,
}

impl Default for EvaluationPlan {
    fn default() -> Self {
        EvaluationPlan { references: 12, genuine: 10, skilled: 10 }
    }
}

/// A questioned signature already compared against all references of the
/// claimed writer; row-major `references x dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionedTrial {
    pub writer: WriterId,
    pub truth: Truth,
    pub dissimilarities: Vec<f64>,
    dim: usize,
}

impl QuestionedTrial {
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.dissimilarities.chunks_exact(self.dim)
    }
}

/// Questioned genuines and skilled forgeries of each writer, precompared to
/// the writer's references, ready to be scored under any feature mask.
pub fn build_evaluation_trials(
    dataset: &Dataset,
    writers: &BTreeSet<WriterId>,
    plan: EvaluationPlan,
    seed: u64,
) -> Result<Vec<QuestionedTrial>> {
    if plan.references == 0 {
        return Err(Error::Config("at least one reference per writer is required".into()));
    }
    let dim = dataset.dim();
    let mut out = Vec::with_capacity(writers.len() * (plan.genuine + plan.skilled));
    for &writer in writers {
        let part = partition_genuines(dataset, writer, plan.references, plan.genuine, seed)?;
        let skilled = crate::data::select_samples(dataset, writer, Label::SkilledForgery, plan.skilled, seed)?;
        let questioned = part
            .questioned
            .iter()
            .map(|q| (*q, Truth::Genuine))
            .chain(skilled.into_iter().map(|q| (q, Truth::Skilled)));
        for (q, truth) in questioned {
            let mut flat = Vec::with_capacity(plan.references * dim);
            for r in &part.references {
                flat.extend(dissimilarity(&q.features, &r.features)?);
            }
            out.push(QuestionedTrial { writer, truth, dissimilarities: flat, dim });
        }
    }
    Ok(out)
}
