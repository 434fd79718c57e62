use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dissim_select::data::write_feature_file;
use dissim_select::experiment::{render_table, run_experiment, ExperimentConfig, ExperimentReport};
use dissim_select::optimizer::Strategy;
use dissim_select::synthetic::{generate, GeneratorConfig};
use dissim_select::Error;

/// Writer-independent signature verification with validated BPSO feature selection.
#[derive(Parser)]
#[command(name = "dissim-select", version)]
struct Cli {
    /// Worker threads (defaults to the number of cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic writer population as a feature CSV.
    Gen(GenArgs),
    /// Run the selection experiment and write its report.
    Run(RunArgs),
    /// Print the comparison table of a finished run.
    Report {
        /// Output directory of a previous `run`.
        dir: PathBuf,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Generator configuration JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    writers: Option<usize>,
    #[arg(long)]
    genuine: Option<usize>,
    #[arg(long)]
    skilled: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    informative: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Destination; a `.gz` suffix writes gzip.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration JSON. Defaults to the synthetic desk profile.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for table1.csv, histories and run artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated strategies, e.g. `no_validation,global_validation`.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    #[arg(long)]
    replications: Option<usize>,
}

fn gen(args: GenArgs) -> Result<(), Error> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid generator config: {e}")))?
        }
        None => GeneratorConfig::default(),
    };
    let GenArgs { writers, genuine, skilled, dim, informative, seed, .. } = args;
    config.n_writers = writers.unwrap_or(config.n_writers);
    config.genuine_per_writer = genuine.unwrap_or(config.genuine_per_writer);
    config.skilled_per_writer = skilled.unwrap_or(config.skilled_per_writer);
    config.dim = dim.unwrap_or(config.dim);
    config.informative_dims = informative.unwrap_or(config.informative_dims);
    config.seed = seed.unwrap_or(config.seed);
    let dataset = generate(&config)?;
    write_feature_file(&dataset, &args.out)?;
    eprintln!(
        "wrote {} signatures of {} writers ({} features) to {}",
        dataset.len(),
        dataset.writer_ids().len(),
        dataset.dim(),
        args.out.display()
    );
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
            Error::Io { path, source } => Error::Config(format!("cannot read {}: {source}", path.display())),
            other => other,
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.output_dir = Some(out);
    }
    if let Some(names) = args.strategies {
        config.strategies = names.iter().map(|s| s.trim().parse::<Strategy>()).collect::<Result<_, _>>()?;
    }
    if let Some(r) = args.replications {
        config.replications = r;
    }
    let report = run_experiment(&config)?;
    print!("{}", render_table(&report));
    if let Some(dir) = &config.output_dir {
        eprintln!("report written to {}", dir.display());
    }
    Ok(())
}

fn report(dir: PathBuf) -> Result<(), Error> {
    let path = dir.join("report.json");
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let report: ExperimentReport =
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    print!("{}", render_table(&report));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Report { dir } => report(dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() {
                2
            } else if e.is_data_error() {
                3
            } else {
                1
            })
        }
    }
}
