use std::collections::BTreeSet;
use std::path::Path;

use dissim_select::classifier::SvmParams;
use dissim_select::data::{load_feature_file, write_feature_file, Dataset, SplitCounts, WriterId};
use dissim_select::experiment::{
    render_table, run_experiment, Approach, DataSource, EvaluationCounts, ExperimentConfig, Exploitation,
    TrainingCounts,
};
use dissim_select::optimizer::{Strategy, SwarmConfig};
use dissim_select::synthetic::GeneratorConfig;
use dissim_select::Error;

fn tiny() -> ExperimentConfig {
    ExperimentConfig {
        data: DataSource::Synthetic(GeneratorConfig {
            n_writers: 16,
            genuine_per_writer: 8,
            skilled_per_writer: 3,
            dim: 8,
            informative_dims: 3,
            ..GeneratorConfig::default()
        }),
        split: SplitCounts { train: 6, validation: 1, opt: 3, sel: 3 },
        exploitation: Exploitation::First(3),
        references: 4,
        training: TrainingCounts { genuine: 3, random_forgery: 3 },
        evaluation: EvaluationCounts { genuine: 3, skilled: 3 },
        strategies: Strategy::ALL.to_vec(),
        replications: 2,
        seed: 5,
        output_dir: None,
        swarm: SwarmConfig { swarm_size: 4, max_iterations: 3, ..SwarmConfig::default() },
        classifier: SvmParams::default(),
    }
}

#[test]
fn minimal_run_has_baseline_and_one_row_per_strategy() {
    let config = ExperimentConfig { strategies: vec![Strategy::NoValidation], replications: 1, ..tiny() };
    let report = run_experiment(&config).unwrap();
    assert!(report.failures.is_empty());
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.summary.len(), 2);
    let base = report.summary_for(Approach::Baseline).unwrap();
    assert_eq!(base.n_features_mean, 8.0);
    assert!(report.rows.iter().all(|r| (0.0..=1.0).contains(&r.test_eer)));
    assert_eq!(report.runs.len(), 1);
    assert_eq!(report.runs[0].outcome.history.len(), 3);
}

#[test]
fn table_schema() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig { output_dir: Some(dir.path().to_path_buf()), ..tiny() };
    let report = run_experiment(&config).unwrap();
    let table = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "approach,n_features_mean,eer_mean_pct,eer_std_pct");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("No feature selection,8.00,"));
    for (line, strategy) in lines[2..].iter().zip(Strategy::ALL) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0], strategy.description());
        let features: f64 = cells[1].parse().unwrap();
        assert!((1.0..=8.0).contains(&features));
        let eer: f64 = cells[2].parse().unwrap();
        assert!((0.0..=100.0).contains(&eer));
    }
    for strategy in Strategy::ALL {
        for r in 0..2 {
            let history =
                std::fs::read_to_string(dir.path().join(format!("history_{}_{r}.csv", strategy.name()))).unwrap();
            assert_eq!(history.lines().next().unwrap(), "iteration,best_opt,best_sel,mean_cardinality");
            assert_eq!(history.lines().count(), 4);
            assert!(dir.path().join(format!("run_{}_{r}.json", strategy.name())).exists());
        }
    }
    let text = render_table(&report);
    assert!(text.contains("Feature selection and global validation"));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&ExperimentConfig { output_dir: Some(a.path().into()), ..tiny() }).unwrap();
    run_experiment(&ExperimentConfig { output_dir: Some(b.path().into()), ..tiny() }).unwrap();
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 1 + 1 + 2 * 3 * 2);
    assert_eq!(fa, fb);
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&ExperimentConfig { output_dir: Some(dir.path().into()), ..tiny() }).unwrap();
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back: dissim_select::experiment::ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

/// Selection never looks at exploitation writers: scrambling their features
/// leaves every swarm run unchanged.
#[test]
fn exploitation_writers_do_not_influence_selection() {
    let dir = tempfile::tempdir().unwrap();
    let DataSource::Synthetic(g) = &tiny().data else { unreachable!() };
    let ds = dissim_select::synthetic::generate(g).unwrap();
    let clean = dir.path().join("clean.csv");
    write_feature_file(&ds, &clean).unwrap();

    let test_writers: BTreeSet<WriterId> = ds.writer_ids()[..3].iter().copied().collect();
    let mut records = load_feature_file(&clean, None).unwrap().records().to_vec();
    for r in records.iter_mut().filter(|r| test_writers.contains(&r.writer)) {
        for v in &mut r.features {
            *v = (*v * 7.0).sin();
        }
    }
    let scrambled = dir.path().join("scrambled.csv");
    write_feature_file(&Dataset::new(records, ds.dim()).unwrap(), &scrambled).unwrap();

    let run = |path: &Path| {
        run_experiment(&ExperimentConfig { data: DataSource::File { path: path.into(), dim: Some(8) }, ..tiny() })
            .unwrap()
    };
    let (a, b) = (run(&clean), run(&scrambled));
    assert_eq!(a.runs, b.runs);
    let masks =
        |r: &dissim_select::experiment::ExperimentReport| r.rows.iter().map(|x| x.mask.clone()).collect::<Vec<_>>();
    assert_eq!(masks(&a), masks(&b));
    assert_ne!(a.rows, b.rows);
}

#[test]
fn failed_replications_mark_cells_incomplete() {
    let config = ExperimentConfig {
        exploitation: Exploitation::Ids(vec![WriterId(1), WriterId(999)]),
        output_dir: None,
        ..tiny()
    };
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.failures.len(), 2);
    assert!(report.summary.iter().all(|s| !s.is_complete()));
    let dir = tempfile::tempdir().unwrap();
    dissim_select::experiment::emit_report(&report, dir.path()).unwrap();
    let table = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert!(table.lines().skip(1).all(|l| l.ends_with(",NA,NA,NA")), "{table}");
}

#[test]
fn config_errors() {
    assert!(matches!(ExperimentConfig::from_json("{\"replications\": 0}").unwrap().validate(), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::from_json("{\"bogus\": 1}"), Err(Error::Config(_))));
    let repeated = ExperimentConfig { strategies: vec![Strategy::LastIteration; 2], ..tiny() };
    assert!(matches!(run_experiment(&repeated), Err(Error::Config(_))));
    let too_many = ExperimentConfig { exploitation: Exploitation::First(15), ..tiny() };
    assert!(run_experiment(&too_many).unwrap_err().is_config_error());
}

#[test]
fn default_config_json_round_trips() {
    let config = ExperimentConfig::default();
    let text = serde_json::to_string_pretty(&config).unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), config);
    assert_eq!(ExperimentConfig::from_json("{}").unwrap(), config);
}
