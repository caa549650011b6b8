//! Run a named experiment and write its CSV report.

use qlocal::experiments::{run_experiment, Experiment, ExperimentConfig};

fn main() -> qlocal::Result<()> {
    let out = std::env::temp_dir().join("qlocal-report");
    let mut config = ExperimentConfig::new(Experiment::RelationValidity).with_d(2).with_shots(100);
    config.out = Some(out.clone());
    let report = run_experiment(&config)?;
    print!("{}", report.describe());
    println!("files in {}", out.display());
    Ok(())
}
