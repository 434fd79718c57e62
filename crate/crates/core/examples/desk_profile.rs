//! Runs the default synthetic experiment and prints the comparison table,
//! per-replication test EERs and informative-feature recall.
//!
//! ```text
//! cargo run --release -p dissim-select --example desk_profile [replications] [seed] [out_dir]
//! ```

use std::time::Instant;

use dissim_select::experiment::{render_table, run_experiment, Approach, DataSource, ExperimentConfig};
use dissim_select::optimizer::Strategy;

fn main() -> dissim_select::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = ExperimentConfig::default();
    if let Some(r) = args.next() {
        config.replications = r.parse().expect("replications");
    }
    if let Some(s) = args.next() {
        config.seed = s.parse().expect("seed");
    }
    config.output_dir = args.next().map(Into::into);
    let DataSource::Synthetic(generator) = &config.data else { unreachable!() };
    let informative = generator.informative_dims;

    let start = Instant::now();
    let report = run_experiment(&config)?;
    println!("{}", render_table(&report));
    for strategy in Strategy::ALL {
        let rows: Vec<_> = report.rows_for(Approach::Selection(strategy)).collect();
        let eers: Vec<String> = rows.iter().map(|r| format!("{:.2}", 100.0 * r.test_eer)).collect();
        let recall: f64 = rows
            .iter()
            .map(|r| r.mask.selected().filter(|&i| i < informative).count() as f64 / informative as f64)
            .sum::<f64>()
            / rows.len() as f64;
        println!("{strategy:>18}: eer {eers:?} recall {recall:.2}");
    }
    let base: Vec<String> = report.rows_for(Approach::Baseline).map(|r| format!("{:.2}", 100.0 * r.test_eer)).collect();
    println!("{:>18}: eer {base:?}", "baseline");
    let mean = |a: Approach| report.rows_for(a).map(|r| 100.0 * r.test_eer).sum::<f64>() / config.replications as f64;
    let gv = mean(Approach::Selection(Strategy::GlobalValidation));
    println!(
        "GV-LI {:+.2}  GV-NV {:+.2}  GV-base {:+.2}",
        gv - mean(Approach::Selection(Strategy::LastIteration)),
        gv - mean(Approach::Selection(Strategy::NoValidation)),
        gv - mean(Approach::Baseline)
    );
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
