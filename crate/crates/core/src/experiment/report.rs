use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentReport, ReplicationRow};
use crate::error::{Error, Result};
use crate::optimizer::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Approach {
    /// All features, no optimisation.
    Baseline,
    Selection(Strategy),
}

impl Approach {
    pub fn description(self) -> &'static str {
        match self {
            Approach::Baseline => "No feature selection",
            Approach::Selection(s) => s.description(),
        }
    }
}

/// One line of the strategy comparison table. EERs are in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub approach: Approach,
    pub n_features_mean: f64,
    pub eer_mean_pct: f64,
    /// Sample standard deviation over replications (0 for a single one).
    pub eer_std_pct: f64,
    pub completed: usize,
    pub expected: usize,
}

impl SummaryRow {
    pub fn from_rows<'a>(approach: Approach, rows: impl Iterator<Item = &'a ReplicationRow>, expected: usize) -> Self {
        let rows: Vec<&ReplicationRow> = rows.collect();
        let n = rows.len() as f64;
        let eers: Vec<f64> = rows.iter().map(|r| 100.0 * r.test_eer).collect();
        let mean = eers.iter().sum::<f64>() / n;
        let std = if rows.len() > 1 {
            (eers.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        SummaryRow {
            approach,
            n_features_mean: rows.iter().map(|r| r.n_features as f64).sum::<f64>() / n,
            eer_mean_pct: mean,
            eer_std_pct: std,
            completed: rows.len(),
            expected,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.completed == self.expected
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_table1(report: &ExperimentReport, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "approach,n_features_mean,eer_mean_pct,eer_std_pct")?;
    for s in &report.summary {
        if s.is_complete() {
            writeln!(
                w,
                "{},{:.2},{:.4},{:.4}",
                s.approach.description(),
                s.n_features_mean,
                s.eer_mean_pct,
                s.eer_std_pct
            )?;
        } else {
            writeln!(w, "{},NA,NA,NA", s.approach.description())?;
        }
    }
    Ok(())
}

/// Writes `table1.csv`, `report.json`, and per run `history_<strategy>_<rep>.csv`
/// and `run_<strategy>_<rep>.json` into `dir`, creating it if needed.
pub fn emit_report(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join("table1.csv");
    write_table1(report, &mut create(&path)?).map_err(|e| Error::io(&path, e))?;

    for run in &report.runs {
        let stem = format!("{}_{}", run.strategy.name(), run.replication);
        let path = dir.join(format!("history_{stem}.csv"));
        run.outcome.write_history_csv(&mut create(&path)?).map_err(|e| Error::io(&path, e))?;
        let path = dir.join(format!("run_{stem}.json"));
        fs::write(&path, run.outcome.to_json()? + "\n").map_err(|e| Error::io(&path, e))?;
    }

    let path = dir.join("report.json");
    fs::write(&path, serde_json::to_string_pretty(report)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// Plain-text rendering of the comparison table, EER as `mean (std)` percent.
pub fn render_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let width = report.summary.iter().map(|s| s.approach.description().len()).max().unwrap_or(8).max("Approach".len());
    out.push_str(&format!("{:<width$}  {:>10}  {:>14}\n", "Approach", "#features", "EER (%)"));
    for s in &report.summary {
        let (features, eer) = if s.is_complete() {
            (format!("{:.1}", s.n_features_mean), format!("{:.2} ({:.2})", s.eer_mean_pct, s.eer_std_pct))
        } else {
            ("NA".to_string(), format!("incomplete {}/{}", s.completed, s.expected))
        };
        out.push_str(&format!("{:<width$}  {:>10}  {:>14}\n", s.approach.description(), features, eer));
    }
    for f in &report.failures {
        out.push_str(&format!("replication {} failed: {}\n", f.replication, f.error));
    }
    out
}
