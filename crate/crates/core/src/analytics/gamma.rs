use std::collections::BTreeMap;

use super::{DistributionKind, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::net::{Outputs, Protocol};
use crate::protocols::{process_pd, sample_schema, TriangleInput};
use crate::quantum::Bitstring;

/// Largest `d` accepted by [`exact_gamma`].
pub const MAX_GAMMA_D: usize = 6;

/// Exact law of `(b_0, b_1, b_2, x)` when each `b_i` is an unbiased bit and
/// `x` is the outcome of the triangle process on `b`.
pub fn exact_gamma(d: usize) -> Result<OutcomeDistribution> {
    if d > MAX_GAMMA_D {
        return Err(Error::Resource { what: "ring size for the exact sampling law", limit: 3 * MAX_GAMMA_D, requested: 3 * d });
    }
    let mut entries = BTreeMap::new();
    for b in TriangleInput::all() {
        let prefix = Bitstring::from_bits(&b.b)?;
        for (x, p) in process_pd(d, b)?.exact_distribution().iter() {
            entries.insert(prefix.concat(x)?, p / 8.0);
        }
    }
    OutcomeDistribution::from_entries(sample_schema(d), DistributionKind::Exact, entries)
}

/// Converts an exact output law into a distribution over records.
pub fn law_to_distribution<'a>(
    law: impl IntoIterator<Item = (&'a Outputs, f64)>,
    schema: Vec<String>,
    record: impl Fn(&Outputs) -> Result<Bitstring>,
) -> Result<OutcomeDistribution> {
    let mut entries: BTreeMap<Bitstring, f64> = BTreeMap::new();
    for (outputs, p) in law {
        *entries.entry(record(outputs)?).or_insert(0.0) += p;
    }
    OutcomeDistribution::from_entries(schema, DistributionKind::Exact, entries)
}

/// Exact law of a protocol with finite randomness, by enumerating every
/// random assignment (and, for quantum protocols, every measurement
/// outcome).
pub fn exact_classical_distribution(
    protocol: &Protocol,
    schema: Vec<String>,
    record: impl Fn(&Outputs) -> Result<Bitstring>,
) -> Result<OutcomeDistribution> {
    let law = protocol.exact_law()?;
    law_to_distribution(law.iter().map(|(o, &p)| (o, p)), schema, record)
}

/// Frequency table over `shots` seeded runs.
pub fn empirical_distribution(
    protocol: &Protocol,
    shots: usize,
    seed: u64,
    schema: Vec<String>,
    record: impl Fn(&Outputs) -> Result<Bitstring>,
) -> Result<OutcomeDistribution> {
    if shots == 0 {
        return Err(Error::arg("at least one shot is required"));
    }
    let mut counts: BTreeMap<Bitstring, u64> = BTreeMap::new();
    for outputs in protocol.sample(shots, seed)? {
        *counts.entry(record(&outputs)?).or_insert(0) += 1;
    }
    OutcomeDistribution::from_counts(schema, &counts)
}
