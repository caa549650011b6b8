//! Disjoint copies of the relation problem: classical success decays as
//! the per-copy rate to the k-th power, the quantum protocol stays valid.

use qlocal::experiments::{run_experiment, Experiment, ExperimentConfig};

fn main() -> qlocal::Result<()> {
    for k in 1..=3 {
        let config = ExperimentConfig::new(Experiment::KCopies).with_d(2).with_k(k).with_shots(20);
        let report = run_experiment(&config)?;
        for (key, value) in &report.headline {
            print!("{key}={value} ");
        }
        println!("passed={}", report.passed());
    }
    Ok(())
}
