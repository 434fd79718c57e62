//! The full protocol: split writers, build and condense the training set,
//! select features under each validation strategy, and measure test EER on
//! the exploitation writers, repeated over seeded replications.

mod report;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{FeatureMask, SvmParams};
use crate::condense::condense;
use crate::data::{load_feature_file, split_writers, Dataset, SplitCounts, WriterId, WriterSplit};
use crate::dichotomy::{build_evaluation_trials, build_training_set, EvaluationPlan, TrainingPlan};
use crate::error::{Error, Result};
use crate::optimizer::{evaluate, BinaryPso, FitnessContext, Objective, RunOutcome, Strategy, SwarmConfig};
use crate::rng::{derive_seed, tag};
use crate::synthetic::{generate, GeneratorConfig};

pub use report::{emit_report, render_table, Approach, SummaryRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synthetic(GeneratorConfig),
    File {
        path: PathBuf,
        #[serde(default)]
        dim: Option<usize>,
    },
}

/// Which writers form the test (exploitation) set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploitation {
    /// The `n` lowest writer ids.
    First(usize),
    Ids(Vec<WriterId>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingCounts {
    pub genuine: usize,
    pub random_forgery: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationCounts {
    pub genuine: usize,
    pub skilled: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub split: SplitCounts,
    pub exploitation: Exploitation,
    pub references: usize,
    pub training: TrainingCounts,
    pub evaluation: EvaluationCounts,
    pub strategies: Vec<Strategy>,
    pub replications: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Strategy and seed are set per run.
    pub swarm: SwarmConfig,
    /// The seed is set per replication.
    pub classifier: SvmParams,
}

impl Default for ExperimentConfig {
    /// Desk-scale synthetic profile: 60 writers split 20/10/10/10 with 10
    /// exploitation writers, 64 features of which 16 informative.
    fn default() -> Self {
        ExperimentConfig {
            data: DataSource::Synthetic(GeneratorConfig::default()),
            split: SplitCounts { train: 20, validation: 10, opt: 10, sel: 10 },
            exploitation: Exploitation::First(10),
            references: 12,
            training: TrainingCounts { genuine: 10, random_forgery: 10 },
            evaluation: EvaluationCounts { genuine: 10, skilled: 10 },
            strategies: Strategy::ALL.to_vec(),
            replications: 5,
            seed: 1,
            output_dir: None,
            swarm: SwarmConfig::default(),
            classifier: SvmParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid experiment config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        let unique: BTreeSet<_> = self.strategies.iter().collect();
        if unique.len() != self.strategies.len() {
            return Err(Error::Config("strategies must not repeat".into()));
        }
        if self.references == 0 {
            return Err(Error::Config("references must be at least 1".into()));
        }
        if self.split.train < 2 || self.split.opt == 0 || self.split.sel == 0 {
            return Err(Error::Config("split needs at least 2 train writers and 1 Opt and 1 Sel writer".into()));
        }
        if self.evaluation.genuine == 0 || self.evaluation.skilled == 0 {
            return Err(Error::Config("evaluation needs genuine and skilled trials".into()));
        }
        if let DataSource::Synthetic(g) = &self.data {
            g.validate()?;
        }
        self.swarm.validate()?;
        self.classifier.validate()
    }

    pub fn training_plan(&self) -> TrainingPlan {
        TrainingPlan {
            references: self.references,
            genuine: self.training.genuine,
            random_forgery: self.training.random_forgery,
        }
    }

    pub fn evaluation_plan(&self) -> EvaluationPlan {
        EvaluationPlan {
            references: self.references,
            genuine: self.evaluation.genuine,
            skilled: self.evaluation.skilled,
        }
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        match &self.data {
            DataSource::Synthetic(g) => generate(g),
            DataSource::File { path, dim } => load_feature_file(path, *dim),
        }
    }

    pub fn exploitation_writers(&self, dataset: &Dataset) -> Result<BTreeSet<WriterId>> {
        match &self.exploitation {
            Exploitation::First(n) => {
                if *n > dataset.writer_ids().len() {
                    return Err(Error::Config(format!(
                        "{n} exploitation writers requested, dataset has {}",
                        dataset.writer_ids().len()
                    )));
                }
                Ok(dataset.writer_ids()[..*n].iter().copied().collect())
            }
            Exploitation::Ids(ids) => Ok(ids.iter().copied().collect()),
        }
    }

    /// Seed of replication `r`.
    pub fn replication_seed(&self, replication: usize) -> u64 {
        derive_seed(self.seed, &[tag::REPLICATION, replication as u64])
    }
}

/// Test EER and selection outcome of one approach in one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub replication: usize,
    pub approach: Approach,
    pub n_features: usize,
    /// Fraction in [0, 1].
    pub test_eer: f64,
    pub mask: FeatureMask,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRun {
    pub replication: usize,
    pub strategy: Strategy,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationFailure {
    pub replication: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dim: usize,
    pub summary: Vec<SummaryRow>,
    pub rows: Vec<ReplicationRow>,
    pub runs: Vec<StrategyRun>,
    pub failures: Vec<ReplicationFailure>,
}

impl ExperimentReport {
    pub fn summary_for(&self, approach: Approach) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.approach == approach)
    }

    pub fn rows_for(&self, approach: Approach) -> impl Iterator<Item = &ReplicationRow> {
        self.rows.iter().filter(move |r| r.approach == approach)
    }
}

struct ReplicationResult {
    rows: Vec<ReplicationRow>,
    runs: Vec<StrategyRun>,
}

fn run_replication(
    config: &ExperimentConfig,
    dataset: &Dataset,
    exploitation: &BTreeSet<WriterId>,
    replication: usize,
) -> Result<ReplicationResult> {
    let seed = config.replication_seed(replication);
    let split = split_writers(dataset, exploitation, config.split, seed)?;
    check_test_isolation(&split)?;

    let training = build_training_set(dataset, &split.train, config.training_plan(), seed)?;
    let condensed = condense(&training, seed)?;
    let hyper = SvmParams { seed, ..config.classifier };
    let ctx = FitnessContext::from_dataset(
        dataset,
        condensed,
        &split.opt,
        &split.sel,
        config.evaluation_plan(),
        hyper,
        seed,
    )?;
    let test = build_evaluation_trials(dataset, &split.exploitation, config.evaluation_plan(), seed)?;

    let test_row = |approach: Approach, mask: FeatureMask| -> Result<ReplicationRow> {
        let model = ctx.model(&mask)?;
        Ok(ReplicationRow {
            replication,
            approach,
            n_features: mask.cardinality(),
            test_eer: evaluate(&model, &test)?,
            mask,
        })
    };

    let mut rows = vec![test_row(Approach::Baseline, FeatureMask::all(ctx.dim()))?];
    let swarm_seed = derive_seed(seed, &[tag::SWARM_INIT]);
    let outcomes = config
        .strategies
        .par_iter()
        .map(|&strategy| {
            let swarm = SwarmConfig { strategy, seed: swarm_seed, ..config.swarm.clone() };
            BinaryPso::new(swarm)?.run(&ctx).map(|o| (strategy, o))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut runs = Vec::with_capacity(outcomes.len());
    for (strategy, outcome) in outcomes {
        rows.push(test_row(Approach::Selection(strategy), outcome.final_mask.clone())?);
        runs.push(StrategyRun { replication, strategy, outcome });
    }
    Ok(ReplicationResult { rows, runs })
}

fn check_test_isolation(split: &WriterSplit) -> Result<()> {
    let used: BTreeSet<WriterId> = split.train.iter().chain(&split.opt).chain(&split.sel).copied().collect();
    if let Some(w) = split.exploitation.intersection(&used).next() {
        return Err(Error::Data(format!("exploitation writer {w} also used for training or selection")));
    }
    Ok(())
}

/// Runs every replication and strategy and, when `output_dir` is set,
/// writes the report files there.
///
/// Configuration and data-loading problems are returned as errors. A failing
/// replication is recorded in the report and its cells are marked incomplete.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let dataset = config.load_dataset()?;
    let exploitation = config.exploitation_writers(&dataset)?;
    let available = dataset.writer_ids().iter().filter(|w| !exploitation.contains(w)).count();
    if config.split.total() > available {
        return Err(Error::Config(format!(
            "split requests {} development writers but only {available} are available",
            config.split.total()
        )));
    }

    let results: Vec<(usize, Result<ReplicationResult>)> = (0..config.replications)
        .into_par_iter()
        .map(|r| (r, run_replication(config, &dataset, &exploitation, r)))
        .collect();

    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (replication, result) in results {
        match result {
            Ok(mut r) => {
                rows.append(&mut r.rows);
                runs.append(&mut r.runs);
            }
            Err(e) => failures.push(ReplicationFailure { replication, error: e.to_string() }),
        }
    }

    let mut approaches = vec![Approach::Baseline];
    approaches.extend(config.strategies.iter().map(|&s| Approach::Selection(s)));
    let summary = approaches
        .into_iter()
        .map(|a| SummaryRow::from_rows(a, rows.iter().filter(|r| r.approach == a), config.replications))
        .collect();

    let report = ExperimentReport {
        config: ExperimentConfig { output_dir: None, ..config.clone() },
        dim: dataset.dim(),
        summary,
        rows,
        runs,
        failures,
    };
    if let Some(dir) = &config.output_dir {
        emit_report(&report, dir)?;
    }
    Ok(report)
}
