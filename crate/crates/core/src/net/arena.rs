//! Global quantum memory shared by all nodes of one execution.
//!
//! The arena holds a single normalized state over every live qubit. It is
//! stored as a tensor product of factors: qubits start in their own factor
//! and factors are merged when a two-qubit gate straddles them. Each factor
//! keeps its amplitudes dense or as a sparse `(basis, amplitude)` list,
//! whichever is smaller, so protocols whose support is far below
//! `2^qubits` (register copies made with CNOT) stay tractable.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::NodeId;
use crate::error::{Error, Result};
use crate::quantum::state::apply_dense;
use crate::quantum::{GateKind, Gate, QubitId, StateVector, DEFAULT_MAX_QUBITS};

/// Sparse entries with `|a|²` at or below this are dropped.
const PRUNE: f64 = 1e-24;
/// Factors up to this many qubits are always dense.
const ALWAYS_DENSE: usize = 12;
/// Threshold on `|c|² - n0·n1` when checking that a qubit factors out.
const PRODUCT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArenaLimits {
    /// Qubits in one factor (sparse keys are 64-bit).
    pub max_factor_qubits: usize,
    /// Non-zero amplitudes in one sparse factor.
    pub max_support: usize,
    /// Largest factor kept dense, and largest exported statevector.
    pub max_dense_qubits: usize,
}

impl Default for ArenaLimits {
    fn default() -> Self {
        ArenaLimits {
            max_factor_qubits: 64,
            max_support: 1 << 24,
            max_dense_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

#[derive(Clone, Debug)]
enum Amps {
    Dense(Vec<Complex64>),
    Sparse(Vec<(u64, Complex64)>),
}

#[derive(Clone, Debug)]
struct Factor {
    qubits: Vec<QubitId>,
    amps: Amps,
}

impl Factor {
    fn single() -> Self {
        Factor {
            qubits: Vec::new(),
            amps: Amps::Dense(vec![Complex64::new(1.0, 0.0)]),
        }
    }

    fn entries(&self) -> Vec<(u64, Complex64)> {
        match &self.amps {
            Amps::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > PRUNE)
                .map(|(i, a)| (i as u64, *a))
                .collect(),
            Amps::Sparse(v) => v.clone(),
        }
    }

    fn support_len(&self) -> usize {
        match &self.amps {
            Amps::Dense(v) => v.iter().filter(|a| a.norm_sqr() > PRUNE).count(),
            Amps::Sparse(v) => v.len(),
        }
    }

    fn prefers_dense(nq: usize, support: usize, limits: &ArenaLimits) -> bool {
        nq <= limits.max_dense_qubits.min(30)
            && (nq <= ALWAYS_DENSE || (1usize << nq) <= 4 * support)
    }

    fn from_entries(qubits: Vec<QubitId>, entries: Vec<(u64, Complex64)>, limits: &ArenaLimits) -> Result<Self> {
        let nq = qubits.len();
        let amps = if Self::prefers_dense(nq, entries.len(), limits) {
            let mut v = vec![Complex64::new(0.0, 0.0); 1 << nq];
            for (k, a) in entries {
                v[k as usize] = a;
            }
            Amps::Dense(v)
        } else {
            if entries.len() > limits.max_support {
                return Err(Error::Resource {
                    what: "sparse factor support",
                    limit: limits.max_support,
                    requested: entries.len(),
                });
            }
            Amps::Sparse(entries)
        };
        Ok(Factor { qubits, amps })
    }

    fn rebalance(&mut self, limits: &ArenaLimits) -> Result<()> {
        let nq = self.qubits.len();
        let want_dense = Self::prefers_dense(nq, self.support_len(), limits);
        let is_dense = matches!(self.amps, Amps::Dense(_));
        if want_dense != is_dense {
            *self = Self::from_entries(std::mem::take(&mut self.qubits), self.entries(), limits)?;
        }
        Ok(())
    }

    fn position(&self, q: QubitId) -> usize {
        self.qubits.iter().position(|&x| x == q).expect("qubit located in this factor")
    }

    fn apply(&mut self, kind: GateKind, pos: &[usize], limits: &ArenaLimits) -> Result<()> {
        match &mut self.amps {
            Amps::Dense(v) => apply_dense(v, kind, pos),
            Amps::Sparse(v) => {
                let i = Complex64::new(0.0, 1.0);
                match kind {
                    GateKind::SPower(false) => {}
                    GateKind::S | GateKind::SPower(true) => {
                        let m = 1u64 << pos[0];
                        v.iter_mut().filter(|(k, _)| k & m != 0).for_each(|(_, a)| *a *= i);
                    }
                    GateKind::Cz | GateKind::Cs => {
                        let mask = (1u64 << pos[0]) | (1u64 << pos[1]);
                        let phase = if kind == GateKind::Cz { Complex64::new(-1.0, 0.0) } else { i };
                        v.iter_mut().filter(|(k, _)| k & mask == mask).for_each(|(_, a)| *a *= phase);
                    }
                    GateKind::Cnot => {
                        let (c, t) = (1u64 << pos[0], 1u64 << pos[1]);
                        v.iter_mut().filter(|(k, _)| k & c != 0).for_each(|(k, _)| *k ^= t);
                    }
                    GateKind::H => {
                        let m = 1u64 << pos[0];
                        v.sort_unstable_by_key(|&(k, _)| (k & !m, k & m));
                        let s = FRAC_1_SQRT_2;
                        let mut out = Vec::with_capacity(v.len() * 2);
                        let mut idx = 0;
                        while idx < v.len() {
                            let base = v[idx].0 & !m;
                            let (mut a0, mut a1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                            while idx < v.len() && v[idx].0 & !m == base {
                                if v[idx].0 & m == 0 {
                                    a0 = v[idx].1;
                                } else {
                                    a1 = v[idx].1;
                                }
                                idx += 1;
                            }
                            for (key, amp) in [(base, (a0 + a1) * s), (base | m, (a0 - a1) * s)] {
                                if amp.norm_sqr() > PRUNE {
                                    out.push((key, amp));
                                }
                            }
                        }
                        if out.len() > limits.max_support {
                            return Err(Error::Resource {
                                what: "sparse factor support",
                                limit: limits.max_support,
                                requested: out.len(),
                            });
                        }
                        *v = out;
                        self.rebalance(limits)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Splits off the qubit at `pos` if it is in a product state with the
    /// rest of the factor; returns `false` (leaving the factor untouched)
    /// when it is entangled.
    fn remove_if_product(&mut self, pos: usize, limits: &ArenaLimits) -> Result<bool> {
        let m = 1u64 << pos;
        let mut pairs: Vec<(u64, Complex64, Complex64)> = Vec::new();
        match &self.amps {
            Amps::Dense(v) => {
                for (idx, &a0) in v.iter().enumerate() {
                    let idx = idx as u64;
                    if idx & m == 0 {
                        pairs.push((idx, a0, v[(idx | m) as usize]));
                    }
                }
            }
            Amps::Sparse(v) => {
                let mut sorted = v.clone();
                sorted.sort_unstable_by_key(|&(k, _)| (k & !m, k & m));
                let mut idx = 0;
                while idx < sorted.len() {
                    let base = sorted[idx].0 & !m;
                    let mut pair = (base, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                    while idx < sorted.len() && sorted[idx].0 & !m == base {
                        if sorted[idx].0 & m == 0 {
                            pair.1 = sorted[idx].1;
                        } else {
                            pair.2 = sorted[idx].1;
                        }
                        idx += 1;
                    }
                    pairs.push(pair);
                }
            }
        }
        let n0: f64 = pairs.iter().map(|p| p.1.norm_sqr()).sum();
        let n1: f64 = pairs.iter().map(|p| p.2.norm_sqr()).sum();
        let c: Complex64 = pairs.iter().map(|p| p.1.conj() * p.2).sum();
        if n0 * n1 - c.norm_sqr() > PRODUCT_TOL {
            return Ok(false);
        }
        // State of the removed qubit, up to a global phase.
        let (alpha0, alpha1) = if n0 >= n1 {
            let r = n0.sqrt();
            (Complex64::new(r, 0.0), c / r)
        } else {
            let r = n1.sqrt();
            (c.conj() / r, Complex64::new(r, 0.0))
        };
        let low = m - 1;
        let mut rest: Vec<(u64, Complex64)> = pairs
            .into_iter()
            .map(|(base, a0, a1)| {
                let key = ((base >> (pos + 1)) << pos) | (base & low);
                (key, alpha0.conj() * a0 + alpha1.conj() * a1)
            })
            .filter(|(_, a)| a.norm_sqr() > PRUNE)
            .collect();
        let norm: f64 = rest.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
        rest.iter_mut().for_each(|(_, a)| *a /= norm);
        let mut qubits = std::mem::take(&mut self.qubits);
        qubits.remove(pos);
        *self = Factor::from_entries(qubits, rest, limits)?;
        Ok(true)
    }
}

/// Precomputed cumulative tables for repeated terminal measurement.
#[derive(Clone, Debug)]
pub struct MeasurementTable {
    factors: Vec<(Vec<QubitId>, Vec<u64>, Vec<f64>)>,
}

impl MeasurementTable {
    /// One Born-rule sample of every live qubit. Factors are sampled in
    /// slot order, one uniform draw each.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<QubitId, bool> {
        let mut out = BTreeMap::new();
        for (qubits, keys, cum) in &self.factors {
            let u: f64 = rng.gen();
            let total = *cum.last().unwrap_or(&1.0);
            let k = cum.partition_point(|&c| c <= u * total).min(keys.len() - 1);
            for (pos, &q) in qubits.iter().enumerate() {
                out.insert(q, (keys[k] >> pos) & 1 == 1);
            }
        }
        out
    }
}

/// One global state over every live qubit, plus the qubit ownership map.
#[derive(Clone, Debug)]
pub struct QuantumArena {
    factors: Vec<Option<Factor>>,
    location: Vec<Option<usize>>,
    owner: Vec<Option<NodeId>>,
    limits: ArenaLimits,
}

impl Default for QuantumArena {
    fn default() -> Self {
        Self::new(ArenaLimits::default())
    }
}

impl QuantumArena {
    pub fn new(limits: ArenaLimits) -> Self {
        QuantumArena {
            factors: Vec::new(),
            location: Vec::new(),
            owner: Vec::new(),
            limits,
        }
    }

    pub fn limits(&self) -> &ArenaLimits {
        &self.limits
    }

    /// New qubit in `|0⟩`, owned by `owner`.
    pub fn alloc(&mut self, owner: NodeId) -> QubitId {
        let q = QubitId(self.location.len() as u32);
        let mut f = Factor::single();
        f.qubits.push(q);
        f.amps = Amps::Dense(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        self.factors.push(Some(f));
        self.location.push(Some(self.factors.len() - 1));
        self.owner.push(Some(owner));
        q
    }

    pub fn is_live(&self, q: QubitId) -> bool {
        self.location.get(q.index()).is_some_and(Option::is_some)
    }

    pub fn owner(&self, q: QubitId) -> Option<NodeId> {
        self.owner.get(q.index()).copied().flatten()
    }

    pub fn live_qubits(&self) -> Vec<QubitId> {
        (0..self.location.len())
            .filter(|&i| self.location[i].is_some())
            .map(QubitId::from)
            .collect()
    }

    pub fn owned_by(&self, node: NodeId) -> Vec<QubitId> {
        self.live_qubits().into_iter().filter(|&q| self.owner(q) == Some(node)).collect()
    }

    pub fn num_live(&self) -> usize {
        self.location.iter().filter(|l| l.is_some()).count()
    }

    /// Qubit counts of the tensor factors, in slot order.
    pub fn factor_sizes(&self) -> Vec<usize> {
        self.factors.iter().flatten().map(|f| f.qubits.len()).collect()
    }

    pub(crate) fn set_owner(&mut self, q: QubitId, node: NodeId) {
        self.owner[q.index()] = Some(node);
    }

    fn slot(&self, q: QubitId) -> Result<usize> {
        self.location
            .get(q.index())
            .copied()
            .flatten()
            .ok_or_else(|| Error::arg(format!("qubit {q} is not live")))
    }

    fn merge(&mut self, a: usize, b: usize) -> Result<usize> {
        if a == b {
            return Ok(a);
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let fa = self.factors[keep].as_ref().unwrap();
        let fb = self.factors[gone].as_ref().unwrap();
        let nq = fa.qubits.len() + fb.qubits.len();
        if nq > self.limits.max_factor_qubits {
            return Err(Error::Resource {
                what: "qubits in one entangled factor",
                limit: self.limits.max_factor_qubits,
                requested: nq,
            });
        }
        let (ea, eb) = (fa.entries(), fb.entries());
        if ea.len().saturating_mul(eb.len()) > self.limits.max_support {
            return Err(Error::Resource {
                what: "sparse factor support",
                limit: self.limits.max_support,
                requested: ea.len().saturating_mul(eb.len()),
            });
        }
        let shift = fa.qubits.len();
        let mut entries = Vec::with_capacity(ea.len() * eb.len());
        for &(kb, ab) in &eb {
            for &(ka, aa) in &ea {
                entries.push((ka | (kb << shift), aa * ab));
            }
        }
        let mut qubits = fa.qubits.clone();
        qubits.extend_from_slice(&fb.qubits);
        let merged = Factor::from_entries(qubits, entries, &self.limits)?;
        for &q in &merged.qubits {
            self.location[q.index()] = Some(keep);
        }
        self.factors[keep] = Some(merged);
        self.factors[gone] = None;
        Ok(keep)
    }

    /// Applies `gate` with no ownership check; the engine checks ownership
    /// before calling this.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let targets = gate.targets();
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::arg(format!("{gate}: duplicate target")));
        }
        let mut slot = self.slot(targets[0])?;
        if targets.len() == 2 {
            let other = self.slot(targets[1])?;
            slot = self.merge(slot, other)?;
        }
        let limits = self.limits;
        let f = self.factors[slot].as_mut().unwrap();
        let pos: Vec<usize> = targets.iter().map(|&q| f.position(q)).collect();
        f.apply(gate.kind(), &pos, &limits)
    }

    /// Removes `q` from the state. Fails unless `q` is in a product state
    /// with every other live qubit.
    pub fn dispose(&mut self, q: QubitId) -> Result<()> {
        let slot = self.slot(q)?;
        let limits = self.limits;
        let f = self.factors[slot].as_mut().unwrap();
        if f.qubits.len() == 1 {
            self.factors[slot] = None;
        } else {
            let pos = f.position(q);
            if !f.remove_if_product(pos, &limits)? {
                return Err(Error::EntangledDisposal(q));
            }
        }
        self.location[q.index()] = None;
        self.owner[q.index()] = None;
        Ok(())
    }

    /// Dense export of the global state with qubit `k` of the result being
    /// `order[k]`. `order` must list every live qubit exactly once.
    pub fn state_vector(&self, order: &[QubitId]) -> Result<StateVector> {
        let live: BTreeSet<QubitId> = self.live_qubits().into_iter().collect();
        let listed: BTreeSet<QubitId> = order.iter().copied().collect();
        if listed.len() != order.len() || listed != live {
            return Err(Error::arg("export order must list every live qubit exactly once"));
        }
        if order.len() > self.limits.max_dense_qubits {
            return Err(Error::Resource {
                what: "statevector qubits",
                limit: self.limits.max_dense_qubits,
                requested: order.len(),
            });
        }
        let rank: BTreeMap<QubitId, usize> = order.iter().enumerate().map(|(k, &q)| (q, k)).collect();
        let mut acc: Vec<(u64, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
        for f in self.factors.iter().flatten() {
            let scatter: Vec<usize> = f.qubits.iter().map(|q| rank[q]).collect();
            let entries: Vec<(u64, Complex64)> = f
                .entries()
                .into_iter()
                .map(|(k, a)| {
                    let g = scatter
                        .iter()
                        .enumerate()
                        .filter(|(pos, _)| (k >> pos) & 1 == 1)
                        .fold(0u64, |g, (_, &r)| g | (1 << r));
                    (g, a)
                })
                .collect();
            acc = acc
                .iter()
                .flat_map(|&(ga, aa)| entries.iter().map(move |&(gb, ab)| (ga | gb, aa * ab)))
                .collect();
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << order.len()];
        for (g, a) in acc {
            amps[g as usize] = a;
        }
        let labels = order.iter().map(|q| q.to_string()).collect();
        StateVector::from_amplitudes(amps)?.with_labels(labels)
    }

    pub fn measurement_table(&self) -> MeasurementTable {
        let factors = self
            .factors
            .iter()
            .flatten()
            .map(|f| {
                let entries = f.entries();
                let mut acc = 0.0;
                let mut keys = Vec::with_capacity(entries.len());
                let mut cum = Vec::with_capacity(entries.len());
                for (k, a) in entries {
                    acc += a.norm_sqr();
                    keys.push(k);
                    cum.push(acc);
                }
                (f.qubits.clone(), keys, cum)
            })
            .collect();
        MeasurementTable { factors }
    }

    /// Exact joint law of measuring the listed qubits in the computational
    /// basis. Outcomes with probability at or below `1e-20` are dropped.
    pub fn terminal_law(&self, qubits: &BTreeSet<QubitId>) -> Result<Vec<(BTreeMap<QubitId, bool>, f64)>> {
        for &q in qubits {
            self.slot(q)?;
        }
        let mut law: Vec<(BTreeMap<QubitId, bool>, f64)> = vec![(BTreeMap::new(), 1.0)];
        for f in self.factors.iter().flatten() {
            let wanted: Vec<(usize, QubitId)> = f
                .qubits
                .iter()
                .enumerate()
                .filter(|(_, q)| qubits.contains(q))
                .map(|(p, &q)| (p, q))
                .collect();
            if wanted.is_empty() {
                continue;
            }
            let mut marginal: BTreeMap<u64, f64> = BTreeMap::new();
            for (k, a) in f.entries() {
                let proj = wanted
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &(p, _))| acc | (((k >> p) & 1) << j));
                *marginal.entry(proj).or_insert(0.0) += a.norm_sqr();
            }
            let mut next = Vec::with_capacity(law.len() * marginal.len());
            for (outcome, p) in &law {
                for (&proj, &pm) in &marginal {
                    if pm <= 1e-20 {
                        continue;
                    }
                    let mut o = outcome.clone();
                    for (j, &(_, q)) in wanted.iter().enumerate() {
                        o.insert(q, (proj >> j) & 1 == 1);
                    }
                    next.push((o, p * pm));
                }
            }
            law = next;
        }
        Ok(law)
    }

    /// Draws one Born-rule sample of every live qubit.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BTreeMap<QubitId, bool> {
        self.measurement_table().sample(rng)
    }
}
