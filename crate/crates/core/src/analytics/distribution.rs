use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::quantum::Bitstring;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistributionKind {
    Exact,
    Empirical { shots: u64 },
}

/// Finite probability distribution over fixed-width records.
///
/// `schema[k]` names position `k` of every outcome, so two distributions
/// are comparable exactly when their schemas are equal.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    schema: Vec<String>,
    kind: DistributionKind,
    entries: BTreeMap<Bitstring, f64>,
}

impl OutcomeDistribution {
    pub fn from_entries(
        schema: Vec<String>,
        kind: DistributionKind,
        entries: BTreeMap<Bitstring, f64>,
    ) -> Result<Self> {
        for (outcome, &p) in &entries {
            if outcome.len() != schema.len() {
                return Err(Error::arg(format!(
                    "outcome {outcome} has width {} but the schema has {}",
                    outcome.len(),
                    schema.len()
                )));
            }
            if !(p >= 0.0) {
                return Err(Error::arg(format!("negative or NaN probability {p} for {outcome}")));
            }
        }
        Ok(OutcomeDistribution { schema, kind, entries })
    }

    /// Frequency table of `counts`; the shot count is the sum of counts.
    pub fn from_counts(schema: Vec<String>, counts: &BTreeMap<Bitstring, u64>) -> Result<Self> {
        let shots: u64 = counts.values().sum();
        if shots == 0 {
            return Err(Error::arg("empirical distribution from zero shots"));
        }
        let entries = counts.iter().map(|(k, &c)| (*k, c as f64 / shots as f64)).collect();
        Self::from_entries(schema, DistributionKind::Empirical { shots }, entries)
    }

    pub fn point_mass(schema: Vec<String>, outcome: Bitstring) -> Result<Self> {
        Self::from_entries(schema, DistributionKind::Exact, BTreeMap::from([(outcome, 1.0)]))
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bitstring, f64)> + '_ {
        self.entries.iter().map(|(k, &p)| (k, p))
    }

    pub fn prob(&self, outcome: &Bitstring) -> f64 {
        self.entries.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Outcomes with probability strictly above `tol`.
    pub fn support(&self, tol: f64) -> BTreeSet<Bitstring> {
        self.entries.iter().filter(|(_, &p)| p > tol).map(|(k, _)| *k).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::arg(format!("no coordinate named {label:?} in the schema")))
    }

    /// Exact projection onto `coords`, in that order.
    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        for &c in coords {
            if c >= self.schema.len() {
                return Err(Error::arg(format!(
                    "coordinate {c} outside a schema of width {}",
                    self.schema.len()
                )));
            }
        }
        let mut entries = BTreeMap::new();
        for (k, &p) in &self.entries {
            *entries.entry(k.select(coords)?).or_insert(0.0) += p;
        }
        let schema = coords.iter().map(|&c| self.schema[c].clone()).collect();
        Self::from_entries(schema, self.kind, entries)
    }

    /// Structured-text export: a header naming kind and schema, then one
    /// `outcome,probability` row per entry in outcome order.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# qlocal distribution v1\n");
        match self.kind {
            DistributionKind::Exact => out.push_str("# kind exact\n"),
            DistributionKind::Empirical { shots } => {
                let _ = writeln!(out, "# kind empirical {shots}");
            }
        }
        let _ = writeln!(out, "# schema {}", self.schema.join(","));
        out.push_str("outcome,probability\n");
        for (k, p) in &self.entries {
            let _ = writeln!(out, "{k},{p}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let bad = |what: &str| Error::Parse(format!("distribution file: {what}"));
        if lines.next() != Some("# qlocal distribution v1") {
            return Err(bad("missing version header"));
        }
        let kind_line = lines.next().ok_or_else(|| bad("missing kind"))?;
        let kind = match kind_line.strip_prefix("# kind ").map(str::split_whitespace) {
            Some(mut parts) => match (parts.next(), parts.next()) {
                (Some("exact"), None) => DistributionKind::Exact,
                (Some("empirical"), Some(n)) => DistributionKind::Empirical {
                    shots: n.parse().map_err(|_| bad("bad shot count"))?,
                },
                _ => return Err(bad("unknown kind")),
            },
            None => return Err(bad("missing kind")),
        };
        let schema_line = lines.next().and_then(|l| l.strip_prefix("# schema")).ok_or_else(|| bad("missing schema"))?;
        let schema: Vec<String> = schema_line
            .trim()
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        if lines.next() != Some("outcome,probability") {
            return Err(bad("missing column header"));
        }
        let mut entries = BTreeMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (k, p) = line.split_once(',').ok_or_else(|| bad("row without a comma"))?;
            let p: f64 = p.trim().parse().map_err(|_| bad("bad probability"))?;
            let k: Bitstring = k.trim().parse()?;
            if entries.insert(k, p).is_some() {
                return Err(bad("duplicate outcome"));
            }
        }
        Self::from_entries(schema, kind, entries)
    }
}

/// Total variation distance: half the ℓ₁ distance over the union of supports.
pub fn tv_distance(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    if p.schema != q.schema {
        return Err(Error::arg(format!(
            "outcome spaces differ: [{}] vs [{}]",
            p.schema.join(","),
            q.schema.join(",")
        )));
    }
    let keys: BTreeSet<&Bitstring> = p.entries.keys().chain(q.entries.keys()).collect();
    let l1: f64 = keys.into_iter().map(|k| (p.prob(k) - q.prob(k)).abs()).sum();
    Ok(0.5 * l1)
}

/// Projection of `dist` onto the single coordinate `coord`.
pub fn marginal(dist: &OutcomeDistribution, coord: usize) -> Result<OutcomeDistribution> {
    dist.marginal(&[coord])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bit_schema() -> Vec<String> {
        vec!["x".into()]
    }

    fn dist(schema: Vec<String>, probs: &[(&str, f64)]) -> OutcomeDistribution {
        let entries = probs.iter().map(|(k, p)| (k.parse().unwrap(), *p)).collect();
        OutcomeDistribution::from_entries(schema, DistributionKind::Exact, entries).unwrap()
    }

    #[test]
    fn tv_examples() {
        let p = dist(bit_schema(), &[("0", 0.75), ("1", 0.25)]);
        let q = dist(bit_schema(), &[("0", 0.5), ("1", 0.5)]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert!((tv_distance(&p, &q).unwrap() - 0.25).abs() < 1e-15);
        let a = dist(bit_schema(), &[("0", 1.0)]);
        let b = dist(bit_schema(), &[("1", 1.0)]);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        let other = dist(vec!["y".into()], &[("1", 1.0)]);
        assert!(tv_distance(&a, &other).is_err());
    }

    #[test]
    fn marginal_of_point_mass_is_point_mass() {
        let schema: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let d = OutcomeDistribution::point_mass(schema, "101".parse().unwrap()).unwrap();
        let m = marginal(&d, 2).unwrap();
        assert_eq!(m.schema(), &["c".to_string()]);
        assert_eq!(m.prob(&"1".parse().unwrap()), 1.0);
        assert!(marginal(&d, 3).is_err());
    }

    #[test]
    fn text_round_trip() {
        let schema: Vec<String> = vec!["b0".into(), "x0".into()];
        let counts = BTreeMap::from([("01".parse().unwrap(), 3u64), ("11".parse().unwrap(), 1)]);
        let d = OutcomeDistribution::from_counts(schema, &counts).unwrap();
        let back = OutcomeDistribution::from_text(&d.to_text()).unwrap();
        assert_eq!(back, d);
        assert!(OutcomeDistribution::from_text("garbage").is_err());
    }

    fn arb_dist(width: usize) -> impl Strategy<Value = OutcomeDistribution> {
        prop::collection::vec(0.0f64..1.0, 1 << width).prop_map(move |w| {
            let total: f64 = w.iter().sum::<f64>().max(1e-12);
            let schema = (0..width).map(|k| format!("c{k}")).collect();
            let entries = w
                .iter()
                .enumerate()
                .map(|(i, x)| (Bitstring::new(width, i as u64).unwrap(), x / total))
                .collect();
            OutcomeDistribution::from_entries(schema, DistributionKind::Exact, entries).unwrap()
        })
    }

    proptest! {
        #[test]
        fn tv_is_symmetric_and_triangular(p in arb_dist(3), q in arb_dist(3), r in arb_dist(3)) {
            let pq = tv_distance(&p, &q).unwrap();
            prop_assert_eq!(pq, tv_distance(&q, &p).unwrap());
            prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
            prop_assert!(pq <= tv_distance(&p, &r).unwrap() + tv_distance(&r, &q).unwrap() + 1e-12);
        }

        #[test]
        fn marginalizing_never_increases_tv(p in arb_dist(3), q in arb_dist(3), c in 0usize..3) {
            let joint = tv_distance(&p, &q).unwrap();
            let m = tv_distance(&marginal(&p, c).unwrap(), &marginal(&q, c).unwrap()).unwrap();
            prop_assert!(m <= joint + 1e-12);
        }
    }
}
