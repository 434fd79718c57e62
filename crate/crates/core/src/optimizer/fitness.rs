//! Wrapper fitness: train on the condensed set under a mask, then measure the
//! user-threshold EER on the Opt or Sel writers.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::classifier::{train, FeatureMask, SvmParams, TrainedModel};
use crate::condense::CondensedSet;
use crate::data::{Dataset, WriterId};
use crate::dichotomy::{build_evaluation_trials, EvaluationPlan, QuestionedTrial};
use crate::error::{Error, Result};
use crate::metrics::{eer_user, ScoredTrial};

/// Fitness assigned to a mask that selects nothing.
pub const DEGENERATE_PENALTY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvalSet {
    Opt,
    Sel,
}

/// Anything the swarm can minimise. Implementations must be pure in the mask.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn fitness(&self, mask: &FeatureMask, set: EvalSet) -> Result<f64>;
}

/// Max-fused scores of precomputed trials under `model`.
pub fn score_trials(model: &TrainedModel, trials: &[QuestionedTrial]) -> Vec<ScoredTrial> {
    trials
        .iter()
        .map(|t| ScoredTrial {
            writer: t.writer,
            truth: t.truth,
            score: t.rows().map(|u| model.decision(u)).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect()
}

/// User-threshold EER of `model` on `trials`.
pub fn evaluate(model: &TrainedModel, trials: &[QuestionedTrial]) -> Result<f64> {
    Ok(eer_user(&score_trials(model, trials))?.eer)
}

pub struct FitnessContext {
    training: CondensedSet,
    opt: Vec<QuestionedTrial>,
    sel: Vec<QuestionedTrial>,
    hyper: SvmParams,
    dim: usize,
    fitness_cache: Mutex<HashMap<(FeatureMask, EvalSet), f64>>,
    model_cache: Mutex<HashMap<FeatureMask, Arc<TrainedModel>>>,
}

impl FitnessContext {
    pub fn new(
        training: CondensedSet,
        opt: Vec<QuestionedTrial>,
        sel: Vec<QuestionedTrial>,
        hyper: SvmParams,
    ) -> Result<Self> {
        let opt_writers: BTreeSet<WriterId> = opt.iter().map(|t| t.writer).collect();
        if sel.iter().any(|t| opt_writers.contains(&t.writer)) {
            return Err(Error::Config("Opt and Sel writer sets must be disjoint".into()));
        }
        if opt.is_empty() || sel.is_empty() {
            return Err(Error::Config("Opt and Sel trial sets must be nonempty".into()));
        }
        hyper.validate()?;
        let dim = training
            .samples()
            .first()
            .map(|s| s.values.len())
            .ok_or_else(|| Error::Data("empty training set".into()))?;
        Ok(FitnessContext {
            training,
            opt,
            sel,
            hyper,
            dim,
            fitness_cache: Mutex::default(),
            model_cache: Mutex::default(),
        })
    }

    /// Builds Opt and Sel trials for the given writers from `dataset`.
    pub fn from_dataset(
        dataset: &Dataset,
        training: CondensedSet,
        opt_writers: &BTreeSet<WriterId>,
        sel_writers: &BTreeSet<WriterId>,
        plan: EvaluationPlan,
        hyper: SvmParams,
        seed: u64,
    ) -> Result<Self> {
        if !opt_writers.is_disjoint(sel_writers) {
            return Err(Error::Config("Opt and Sel writer sets must be disjoint".into()));
        }
        let opt = build_evaluation_trials(dataset, opt_writers, plan, seed)?;
        let sel = build_evaluation_trials(dataset, sel_writers, plan, seed)?;
        FitnessContext::new(training, opt, sel, hyper)
    }

    pub fn training(&self) -> &CondensedSet {
        &self.training
    }

    pub fn hyper(&self) -> &SvmParams {
        &self.hyper
    }

    pub fn trials(&self, set: EvalSet) -> &[QuestionedTrial] {
        match set {
            EvalSet::Opt => &self.opt,
            EvalSet::Sel => &self.sel,
        }
    }

    /// The classifier trained under `mask`, memoised.
    pub fn model(&self, mask: &FeatureMask) -> Result<Arc<TrainedModel>> {
        if let Some(m) = self.model_cache.lock().expect("model cache poisoned").get(mask) {
            return Ok(Arc::clone(m));
        }
        let model = Arc::new(train(&self.training, mask, &self.hyper)?);
        self.model_cache.lock().expect("model cache poisoned").insert(mask.clone(), Arc::clone(&model));
        Ok(model)
    }

    /// Fitness without consulting or filling the cache.
    pub fn fitness_uncached(&self, mask: &FeatureMask, set: EvalSet) -> Result<f64> {
        if mask.cardinality() == 0 {
            return Ok(DEGENERATE_PENALTY);
        }
        let model = train(&self.training, mask, &self.hyper)?;
        evaluate(&model, self.trials(set))
    }

    pub fn cached_evaluations(&self) -> usize {
        self.fitness_cache.lock().expect("fitness cache poisoned").len()
    }
}

impl Objective for FitnessContext {
    fn dim(&self) -> usize {
        self.dim
    }

    fn fitness(&self, mask: &FeatureMask, set: EvalSet) -> Result<f64> {
        if mask.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, actual: mask.dim() });
        }
        if mask.cardinality() == 0 {
            return Ok(DEGENERATE_PENALTY);
        }
        let key = (mask.clone(), set);
        if let Some(&f) = self.fitness_cache.lock().expect("fitness cache poisoned").get(&key) {
            return Ok(f);
        }
        let model = self.model(mask)?;
        let f = evaluate(&model, self.trials(set))?;
        self.fitness_cache.lock().expect("fitness cache poisoned").insert(key, f);
        Ok(f)
    }
}
