//! Named, seeded experiments that write CSV or JSONL reports.

mod report;
mod runners;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use report::{Check, Format, Report, Table};

use crate::analytics::{OutcomeDistribution, MAX_GAMMA_D};
use crate::error::{Error, Result};
use crate::net::Topology;
use crate::verify::MAX_SUPPORT_D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    RelationValidity,
    Lemma2,
    AffineBound,
    SubgraphFidelity,
    GammaExact,
    TvAdversary,
    KCopies,
    DerandomizeDemo,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::RelationValidity,
        Experiment::Lemma2,
        Experiment::AffineBound,
        Experiment::SubgraphFidelity,
        Experiment::GammaExact,
        Experiment::TvAdversary,
        Experiment::KCopies,
        Experiment::DerandomizeDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::RelationValidity => "relation-validity",
            Experiment::Lemma2 => "lemma2",
            Experiment::AffineBound => "affine-bound",
            Experiment::SubgraphFidelity => "subgraph-fidelity",
            Experiment::GammaExact => "gamma-exact",
            Experiment::TvAdversary => "tv-adversary",
            Experiment::KCopies => "k-copies",
            Experiment::DerandomizeDemo => "derandomize-demo",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
            Error::arg(format!("unknown experiment {s:?} (expected one of {})", names.join(", ")))
        })
    }
}

/// Largest `k` for the copies experiment; the classical side enumerates
/// all `8^k` input tuples.
pub const MAX_COPIES: usize = 4;
/// Networks up to this many nodes get every subgraph assignment.
pub const EXHAUSTIVE_SUBGRAPH_NODES: usize = 12;
const MAX_SUBGRAPH_D: usize = 4;
const MAX_DERANDOMIZE_NODES: usize = 10;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub d: usize,
    pub k: usize,
    /// Round budget; `None` picks the experiment's default.
    pub rounds: Option<usize>,
    pub shots: usize,
    pub seed: u64,
    /// Directory receiving the report files, if any.
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Network for subgraph-fidelity and derandomize-demo instead of the
    /// built-in one.
    pub topology: Option<Topology>,
    /// Directory of on-disk support sets for relation-validity.
    pub support_cache: Option<PathBuf>,
    /// Also write `trace.jsonl` for one representative run.
    pub trace: bool,
    /// Distribution compared against the exact sampling law in gamma-exact.
    pub compare: Option<OutcomeDistribution>,
}

pub const DEFAULT_SEED: u64 = 7;

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            d: 4,
            k: 1,
            rounds: None,
            shots: 500,
            seed: DEFAULT_SEED,
            out: None,
            format: Format::Table,
            topology: None,
            support_cache: None,
            trace: false,
            compare: None,
        }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_rounds(mut self, t: usize) -> Self {
        self.rounds = Some(t);
        self
    }

    pub fn with_shots(mut self, shots: usize) -> Self {
        self.shots = shots;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Round budget after applying the experiment's default.
    pub fn effective_rounds(&self) -> usize {
        self.rounds.unwrap_or(match self.experiment {
            Experiment::AffineBound | Experiment::KCopies => 2.min(self.d / 2),
            Experiment::TvAdversary => 1,
            Experiment::DerandomizeDemo => 2,
            _ => 2,
        })
    }

    fn uses_gd(&self) -> bool {
        match self.experiment {
            Experiment::Lemma2 | Experiment::DerandomizeDemo => false,
            Experiment::SubgraphFidelity => self.topology.is_none(),
            _ => true,
        }
    }

    /// Checks the per-experiment parameter constraints.
    pub fn validate(&self) -> Result<()> {
        use Experiment::*;
        let e = self.experiment;
        let fail = |msg: String| Err(Error::arg(format!("{e}: {msg}")));
        if self.uses_gd() && (self.d < 2 || self.d % 2 == 1) {
            return fail(format!("d must be even and at least 2, got {}", self.d));
        }
        let d_cap = match e {
            RelationValidity => Some(MAX_SUPPORT_D),
            GammaExact | TvAdversary => Some(MAX_GAMMA_D),
            SubgraphFidelity if self.topology.is_none() => Some(MAX_SUBGRAPH_D),
            KCopies => Some(4),
            _ => None,
        };
        if let Some(cap) = d_cap {
            if self.d > cap {
                return fail(format!("d must be at most {cap}, got {}", self.d));
            }
        }
        if self.rounds.is_some() && matches!(e, RelationValidity | SubgraphFidelity | GammaExact | Lemma2) {
            return fail("the round count is fixed; drop T".into());
        }
        let t = self.effective_rounds();
        match e {
            AffineBound | KCopies if t > self.d / 2 => return fail(format!("T must be at most d/2 = {}, got {t}", self.d / 2)),
            TvAdversary if t > self.d / 4 => return fail(format!("T must be at most d/4 = {}, got {t}", self.d / 4)),
            _ => {}
        }
        if e == KCopies && !(1..=MAX_COPIES).contains(&self.k) {
            return fail(format!("k must lie in 1..={MAX_COPIES}, got {}", self.k));
        }
        if self.k != 1 && e != KCopies {
            return fail("k only applies to k-copies".into());
        }
        if self.shots == 0 && matches!(e, RelationValidity | KCopies) {
            return fail("shots must be positive".into());
        }
        if self.topology.is_some() && !matches!(e, SubgraphFidelity | DerandomizeDemo) {
            return fail("an imported topology applies to subgraph-fidelity and derandomize-demo".into());
        }
        if let (DerandomizeDemo, Some(t)) = (e, &self.topology) {
            if t.num_nodes() > MAX_DERANDOMIZE_NODES {
                return fail(format!("at most {MAX_DERANDOMIZE_NODES} nodes, got {}", t.num_nodes()));
            }
        }
        if self.support_cache.is_some() && e != RelationValidity {
            return fail("a support cache applies to relation-validity".into());
        }
        if self.trace && !matches!(e, RelationValidity | AffineBound | SubgraphFidelity | DerandomizeDemo) {
            return fail("traces are recorded by relation-validity, affine-bound, subgraph-fidelity and derandomize-demo".into());
        }
        if self.compare.is_some() && e != GammaExact {
            return fail("a comparison distribution applies to gamma-exact".into());
        }
        Ok(())
    }
}

/// Validates `config`, runs it, and writes the report files when an output
/// directory is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let report = runners::run(config)?;
    if let Some(dir) = &config.out {
        report.write(dir, config.format)?;
    }
    Ok(report)
}

/// Runs the experiment for every `(d, k, T)` in the cartesian product and
/// aggregates one summary row per tuple. A `None` round entry means the
/// experiment's default.
pub fn sweep(base: &ExperimentConfig, ds: &[usize], ks: &[usize], ts: &[Option<usize>]) -> Result<Report> {
    if ds.is_empty() || ks.is_empty() || ts.is_empty() {
        return Err(Error::arg("sweep ranges must not be empty"));
    }
    let mut runs = Vec::new();
    for &d in ds {
        for &k in ks {
            for &t in ts {
                let config = ExperimentConfig { d, k, rounds: t, out: None, ..base.clone() };
                config.validate()?;
                runs.push(((d, k, t), config));
            }
        }
    }
    let mut agg = Report::new(base.experiment.name());
    agg.param("tuples", runs.len());
    for ((d, k, t), config) in runs {
        let report = runners::run(&config)?;
        let tag = format!("d{d}-k{k}-T{}", t.map_or("default".to_string(), |t| t.to_string()));
        if agg.summary.columns.is_empty() {
            let mut cols: Vec<&str> = report.headline.iter().map(|(k, _)| k.as_str()).collect();
            cols.push("passed");
            agg.summary = Table::new(&cols);
            let mut rcols = vec!["tuple"];
            rcols.extend(report.records.columns.iter().map(String::as_str));
            agg.records = Table::new(&rcols);
        }
        let mut row: Vec<String> = report.headline.iter().map(|(_, v)| v.clone()).collect();
        row.push(report.passed().to_string());
        agg.summary.push(row);
        for r in &report.records.rows {
            agg.records.push(std::iter::once(tag.clone()).chain(r.iter().cloned()).collect());
        }
        for c in report.checks {
            agg.checks.push(Check { name: format!("{tag} {}", c.name), ..c });
        }
        for (name, text) in report.artifacts {
            agg.artifacts.push((format!("{tag}-{name}"), text));
        }
    }
    if let Some(dir) = &base.out {
        agg.write(dir, base.format)?;
    }
    Ok(agg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn constraints() {
        assert!(ExperimentConfig::new(Experiment::RelationValidity).with_d(3).validate().is_err());
        assert!(ExperimentConfig::new(Experiment::TvAdversary).with_d(4).with_rounds(2).validate().is_err());
        assert!(ExperimentConfig::new(Experiment::TvAdversary).with_d(4).validate().is_ok());
        assert!(ExperimentConfig::new(Experiment::AffineBound).with_d(4).with_rounds(3).validate().is_err());
        assert!(ExperimentConfig::new(Experiment::KCopies).with_k(0).validate().is_err());
        assert!(ExperimentConfig::new(Experiment::Lemma2).with_d(3).validate().is_ok());
        let base = ExperimentConfig::new(Experiment::Lemma2);
        assert!(matches!(sweep(&base, &[], &[1], &[None]), Err(Error::Argument(_))));
    }
}
