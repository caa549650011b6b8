use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arena::{ArenaLimits, MeasurementTable, QuantumArena};
use super::program::{LocalView, Measurements, Message, Mode, NodeContext, NodeProgram, Outcomes, Outbox};
use super::trace::{ExecutionTrace, RoundRecord, TransferRecord};
use super::{NodeId, Topology};
use crate::error::{Error, Result};
use crate::quantum::QubitId;

/// Output bytes per node.
pub type Outputs = BTreeMap<NodeId, Vec<u8>>;
/// Input bytes per node; nodes without an entry get `None`.
pub type Inputs = BTreeMap<NodeId, Vec<u8>>;

/// Most random bits for which exact branch enumeration is attempted.
pub const DEFAULT_MAX_RANDOM_BITS: usize = 24;
/// Evolved states kept per [`Protocol::sample`] call.
const SHOT_CACHE: usize = 256;

/// Builds a fresh program for a node. Called once per node per shot.
pub trait ProgramFactory: Send + Sync {
    fn program(&self, node: NodeId) -> Box<dyn NodeProgram>;
}

impl<F> ProgramFactory for F
where
    F: Fn(NodeId) -> Box<dyn NodeProgram> + Send + Sync,
{
    fn program(&self, node: NodeId) -> Box<dyn NodeProgram> {
        self(node)
    }
}

/// Random bits of node `node` for run seed `seed`: a ChaCha8 stream keyed
/// by the seed, with stream number `1 + node`.
pub fn node_randomness(seed: u64, node: NodeId, bits: usize) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + node.0 as u64);
    (0..bits).map(|_| rng.gen()).collect()
}

/// Measurement randomness of a run uses stream 0 of the same seed.
fn measurement_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Seed of shot `shot` in a multi-shot run (splitmix64 finalizer).
pub fn shot_seed(seed: u64, shot: u64) -> u64 {
    let mut z = seed ^ shot.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Result of one shot.
#[derive(Clone, Debug)]
pub struct Execution {
    pub outputs: Outputs,
    pub trace: ExecutionTrace,
}

/// State after the last round, before terminal measurement.
pub struct Evolved {
    programs: BTreeMap<NodeId, Box<dyn NodeProgram>>,
    arena: QuantumArena,
    rounds: Vec<RoundRecord>,
    num_rounds: usize,
    mode: Mode,
}

impl Evolved {
    pub fn arena(&self) -> &QuantumArena {
        &self.arena
    }

    pub fn rounds(&self) -> &[RoundRecord] {
        &self.rounds
    }

    fn finalize_with(&self, outcomes: Option<&BTreeMap<QubitId, bool>>) -> Result<(Outputs, BTreeSet<QubitId>)> {
        let mut outputs = Outputs::new();
        let mut measured = BTreeSet::new();
        for (&u, program) in &self.programs {
            let o = match outcomes {
                Some(map) => Outcomes::Fixed(map),
                None => Outcomes::Probe,
            };
            let mut m = Measurements::new(u, self.num_rounds, self.mode, &self.arena, o);
            outputs.insert(u, program.finalize(&mut m)?);
            measured.extend(m.into_measured());
        }
        Ok((outputs, measured))
    }

    /// Outputs for a given assignment of terminal measurement outcomes.
    pub fn finalize(&self, outcomes: &BTreeMap<QubitId, bool>) -> Result<Outputs> {
        Ok(self.finalize_with(Some(outcomes))?.0)
    }

    /// Qubits the programs measure in `finalize`.
    pub fn measured_qubits(&self) -> Result<BTreeSet<QubitId>> {
        Ok(self.finalize_with(None)?.1)
    }

    /// Exact law of the outputs over the terminal measurement.
    pub fn output_law(&self) -> Result<Vec<(Outputs, f64)>> {
        let measured = self.measured_qubits()?;
        let mut law = Vec::new();
        for (outcome, p) in self.arena.terminal_law(&measured)? {
            let (outputs, seen) = self.finalize_with(Some(&outcome))?;
            if seen != measured {
                return Err(Error::arg("the set of measured qubits depends on measurement outcomes"));
            }
            law.push((outputs, p));
        }
        Ok(law)
    }

    fn trace(&self, outputs: Outputs) -> ExecutionTrace {
        ExecutionTrace { rounds: self.rounds.clone(), outputs }
    }
}

/// A topology together with per-node programs, inputs, round count and
/// execution model. Cheap to clone; programs are rebuilt for every shot.
#[derive(Clone)]
pub struct Protocol {
    topology: Topology,
    factory: Arc<dyn ProgramFactory>,
    inputs: Inputs,
    rounds: usize,
    mode: Mode,
    allow_disconnected: bool,
    limits: ArenaLimits,
    max_random_bits: usize,
}

impl std::fmt::Debug for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Protocol")
            .field("nodes", &self.topology.num_nodes())
            .field("rounds", &self.rounds)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl Protocol {
    pub fn new(topology: Topology, rounds: usize, mode: Mode, factory: impl ProgramFactory + 'static) -> Self {
        Protocol {
            topology,
            factory: Arc::new(factory),
            inputs: Inputs::new(),
            rounds,
            mode,
            allow_disconnected: false,
            limits: ArenaLimits::default(),
            max_random_bits: DEFAULT_MAX_RANDOM_BITS,
        }
    }

    pub fn with_inputs(mut self, inputs: Inputs) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn with_limits(mut self, limits: ArenaLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_max_random_bits(mut self, bits: usize) -> Self {
        self.max_random_bits = bits;
        self
    }

    /// Permits disjoint networks such as independent protocol copies.
    pub fn allowing_disconnected(mut self) -> Self {
        self.allow_disconnected = true;
        self
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn inputs(&self) -> &Inputs {
        &self.inputs
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn programs(&self) -> BTreeMap<NodeId, Box<dyn NodeProgram>> {
        self.topology.nodes().iter().map(|&u| (u, self.factory.program(u))).collect()
    }

    /// Runs the rounds with explicit per-node random bits.
    pub fn evolve_with(&self, randomness: &BTreeMap<NodeId, Vec<bool>>) -> Result<Evolved> {
        let programs = self.programs();
        self.evolve_programs(programs, |u, bits| {
            let r = randomness.get(&u).cloned().unwrap_or_default();
            if r.len() != bits {
                return Err(Error::arg(format!("node {u} needs {bits} random bits, got {}", r.len())));
            }
            Ok(r)
        })
    }

    fn evolve_programs(
        &self,
        programs: BTreeMap<NodeId, Box<dyn NodeProgram>>,
        randomness: impl FnMut(NodeId, usize) -> Result<Vec<bool>>,
    ) -> Result<Evolved> {
        if !self.allow_disconnected && !self.topology.is_connected() {
            return Err(Error::Topology("network is disconnected".into()));
        }
        execute(&self.topology, programs, &self.inputs, self.rounds, self.mode, self.limits, randomness)
    }

    fn evolve_seeded(&self, seed: u64) -> Result<Evolved> {
        self.evolve_programs(self.programs(), |u, bits| Ok(node_randomness(seed, u, bits)))
    }

    fn randomness_widths(&self) -> Vec<(NodeId, usize)> {
        let views = views(&self.topology);
        self.programs().iter().map(|(&u, p)| (u, p.randomness_bits(&views[&u]))).collect()
    }

    /// One shot. Identical seeds give identical outputs and traces.
    pub fn run(&self, seed: u64) -> Result<Execution> {
        let evolved = self.evolve_seeded(seed)?;
        let outcomes = evolved.arena.sample(&mut measurement_rng(seed));
        let outputs = evolved.finalize(&outcomes)?;
        Ok(Execution { trace: evolved.trace(outputs.clone()), outputs })
    }

    /// `shots` independent shots; shot `s` equals `run(shot_seed(seed, s))`.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<Vec<Outputs>> {
        let mut cache: HashMap<Vec<Vec<bool>>, Rc<(Evolved, MeasurementTable)>> = HashMap::new();
        let widths = self.randomness_widths();
        let mut out = Vec::with_capacity(shots);
        for s in 0..shots {
            let sseed = shot_seed(seed, s as u64);
            let key: Vec<Vec<bool>> = widths.iter().map(|&(u, w)| node_randomness(sseed, u, w)).collect();
            let entry = match cache.get(&key) {
                Some(e) => Rc::clone(e),
                None => {
                    let evolved = self.evolve_seeded(sseed)?;
                    let table = evolved.arena.measurement_table();
                    let e = Rc::new((evolved, table));
                    if cache.len() < SHOT_CACHE {
                        cache.insert(key, Rc::clone(&e));
                    }
                    e
                }
            };
            let outcomes = entry.1.sample(&mut measurement_rng(sseed));
            out.push(entry.0.finalize(&outcomes)?);
        }
        Ok(out)
    }

    /// Exact output law by enumerating every randomness assignment and
    /// every terminal measurement outcome.
    pub fn exact_law(&self) -> Result<BTreeMap<Outputs, f64>> {
        let widths = self.randomness_widths();
        let total: usize = widths.iter().map(|w| w.1).sum();
        if total > self.max_random_bits {
            return Err(Error::Resource {
                what: "random bits for exact enumeration",
                limit: self.max_random_bits,
                requested: total,
            });
        }
        let weight = 0.5f64.powi(total as i32);
        let mut law: BTreeMap<Outputs, f64> = BTreeMap::new();
        for assignment in 0u64..(1u64 << total) {
            let mut offset = 0;
            let randomness: BTreeMap<NodeId, Vec<bool>> = widths
                .iter()
                .map(|&(u, w)| {
                    let bits = (offset..offset + w).map(|k| (assignment >> k) & 1 == 1).collect();
                    offset += w;
                    (u, bits)
                })
                .collect();
            let evolved = self.evolve_with(&randomness)?;
            for (outputs, p) in evolved.output_law()? {
                *law.entry(outputs).or_insert(0.0) += weight * p;
            }
        }
        Ok(law)
    }
}

/// Executes explicit program instances once. Nodes without an input get
/// `None`; random bits are derived from `seed` per node.
pub fn run(
    topology: &Topology,
    programs: BTreeMap<NodeId, Box<dyn NodeProgram>>,
    inputs: &Inputs,
    rounds: usize,
    seed: u64,
) -> Result<Execution> {
    if !topology.is_connected() {
        return Err(Error::Topology("network is disconnected".into()));
    }
    if programs.keys().ne(topology.nodes().iter()) {
        return Err(Error::arg("exactly one program per node is required"));
    }
    let evolved = execute(topology, programs, inputs, rounds, Mode::Quantum, ArenaLimits::default(), |u, bits| {
        Ok(node_randomness(seed, u, bits))
    })?;
    let outcomes = evolved.arena.sample(&mut measurement_rng(seed));
    let outputs = evolved.finalize(&outcomes)?;
    Ok(Execution { trace: evolved.trace(outputs.clone()), outputs })
}

fn views(topology: &Topology) -> BTreeMap<NodeId, LocalView> {
    let n = topology.num_nodes();
    topology
        .nodes()
        .iter()
        .map(|&u| {
            let neighbors = topology.neighbors(u).expect("node exists").iter().copied().collect();
            (u, LocalView { self_id: u, neighbors, num_nodes: n })
        })
        .collect()
}

fn execute(
    topology: &Topology,
    mut programs: BTreeMap<NodeId, Box<dyn NodeProgram>>,
    inputs: &Inputs,
    rounds: usize,
    mode: Mode,
    limits: ArenaLimits,
    mut randomness: impl FnMut(NodeId, usize) -> Result<Vec<bool>>,
) -> Result<Evolved> {
    let views = views(topology);
    let neighbors: BTreeMap<NodeId, &[NodeId]> =
        views.iter().map(|(&u, v)| (u, v.neighbors.as_slice())).collect();
    for (&u, program) in programs.iter_mut() {
        let view = &views[&u];
        let bits = randomness(u, program.randomness_bits(view))?;
        program.init(view, inputs.get(&u).map(Vec::as_slice), bits)?;
    }

    let mut arena = QuantumArena::new(limits);
    let empty_inbox = |u: NodeId| neighbors[&u].iter().map(|&v| (v, Message::default())).collect();
    let mut inboxes: BTreeMap<NodeId, BTreeMap<NodeId, Message>> =
        topology.nodes().iter().map(|&u| (u, empty_inbox(u))).collect();
    let mut records = Vec::with_capacity(rounds);

    for t in 0..=rounds {
        let mut outboxes: BTreeMap<NodeId, Outbox> = BTreeMap::new();
        for (&u, program) in programs.iter_mut() {
            let mut ctx = NodeContext::new(u, t, mode, &mut arena);
            let outbox = program.round(t, &inboxes[&u], &mut ctx)?;
            for (v, msg) in &outbox {
                if !neighbors[&u].contains(v) {
                    return Err(Error::Protocol { node: u, round: t, reason: format!("message to non-neighbor {v}") });
                }
                if t == rounds && !msg.is_empty() {
                    return Err(Error::Protocol { node: u, round: t, reason: "message sent after the last round".into() });
                }
            }
            outboxes.insert(u, outbox);
        }
        if t == rounds {
            break;
        }
        let mut in_flight = BTreeSet::new();
        for (&u, outbox) in &outboxes {
            for q in outbox.values().flat_map(|m| m.qubits.iter()) {
                if arena.owner(*q) != Some(u) {
                    return Err(Error::Locality { node: u, round: t, qubit: *q });
                }
                if !in_flight.insert(*q) {
                    return Err(Error::Protocol { node: u, round: t, reason: format!("qubit {q} sent twice") });
                }
            }
        }
        let mut next: BTreeMap<NodeId, BTreeMap<NodeId, Message>> =
            topology.nodes().iter().map(|&u| (u, empty_inbox(u))).collect();
        let mut transfers = Vec::new();
        for (u, mut outbox) in outboxes {
            for &v in neighbors[&u] {
                let msg = outbox.remove(&v).unwrap_or_default();
                for &q in &msg.qubits {
                    arena.set_owner(q, v);
                }
                transfers.push(TransferRecord {
                    round: t + 1,
                    from: u,
                    to: v,
                    payload_bytes: msg.payload.len(),
                    qubits: msg.qubits.clone(),
                });
                next.get_mut(&v).unwrap().insert(u, msg);
            }
        }
        records.push(RoundRecord { round: t + 1, transfers });
        inboxes = next;
    }

    Ok(Evolved { programs, arena, rounds: records, num_rounds: rounds, mode })
}
