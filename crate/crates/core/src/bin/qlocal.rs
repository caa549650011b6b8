use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qlocal::analytics::OutcomeDistribution;
use qlocal::experiments::{run_experiment, sweep, Experiment, ExperimentConfig, Format, Report, DEFAULT_SEED};
use qlocal::net::{build_script_gd, Topology};
use qlocal::Error;

/// Runs one named experiment, or a sweep when a flag lists several values.
#[derive(Parser, Debug)]
#[command(name = "qlocal", version)]
struct Args {
    #[arg(long)]
    experiment: Experiment,
    /// Ring parameter; comma list for a sweep.
    #[arg(long, default_value = "4", value_delimiter = ',')]
    d: Vec<usize>,
    /// Number of copies; comma list for a sweep.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    k: Vec<usize>,
    /// Round budget; comma list for a sweep.
    #[arg(long = "T", value_delimiter = ',')]
    t: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    shots: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Report directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "table")]
    format: Format,
    /// Network file to run on instead of the built-in one.
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Write the network used (or the augmented ring for --d) to this file.
    #[arg(long)]
    export_topology: Option<PathBuf>,
    #[arg(long)]
    support_cache: Option<PathBuf>,
    /// Add trace.jsonl to the report.
    #[arg(long)]
    trace: bool,
    /// Distribution file compared with the exact sampling law.
    #[arg(long)]
    compare: Option<PathBuf>,
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::Argument(_) | Error::Resource { .. } | Error::Topology(_) | Error::Parse(_))
}

fn execute(args: Args) -> qlocal::Result<Report> {
    let topology = args.topology.as_ref().map(Topology::load).transpose()?;
    if let Some(path) = &args.export_topology {
        match &topology {
            Some(t) => t.save(path)?,
            None => build_script_gd(args.d[0])?.topology.save(path)?,
        }
    }
    let compare = match &args.compare {
        Some(p) => Some(OutcomeDistribution::from_text(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let mut config = ExperimentConfig::new(args.experiment);
    config.shots = args.shots;
    config.seed = args.seed;
    config.out = args.out;
    config.format = args.format;
    config.topology = topology;
    config.support_cache = args.support_cache;
    config.trace = args.trace;
    config.compare = compare;
    let ts: Vec<Option<usize>> = if args.t.is_empty() { vec![None] } else { args.t.into_iter().map(Some).collect() };
    if args.d.len() == 1 && args.k.len() == 1 && ts.len() == 1 {
        config.d = args.d[0];
        config.k = args.k[0];
        config.rounds = ts[0];
        run_experiment(&config)
    } else {
        sweep(&config, &args.d, &args.k, &ts)
    }
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(report) => {
            print!("{}", report.describe());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qlocal: {e}");
            ExitCode::from(if usage_error(&e) { 2 } else { 1 })
        }
    }
}
