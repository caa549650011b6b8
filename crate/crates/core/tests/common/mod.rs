#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use qlocal::net::{
    Inbox, LocalView, Measurements, Message, Mode, NodeContext, NodeId, NodeProgram, Outbox, Outputs, Protocol, Topology,
};
use qlocal::quantum::{Gate, QubitId};

/// Random graph on `n` nodes with each edge present with probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: u32, p: f64) -> Topology {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Topology::new(0..n, edges).unwrap()
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected(rng: &mut impl Rng, n: u32, extra: f64) -> Topology {
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeMap::new();
    for i in 1..order.len() {
        let a = order[i];
        let b = order[rng.gen_range(0..i)];
        edges.insert((a.min(b), a.max(b)), ());
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(extra) {
                edges.insert((a, b), ());
            }
        }
    }
    Topology::new(0..n, edges.into_keys()).unwrap()
}

/// Quantum program whose outputs mix its own input, a random bit, and
/// everything that reaches it: each round it entangles a fresh qubit with
/// its home qubit and ships it to one neighbor, and entangles every qubit
/// it receives with the home qubit, which is the only one it measures.
pub struct LightCone {
    rounds: usize,
    neighbors: Vec<NodeId>,
    acc: u8,
    random: bool,
    home: Option<QubitId>,
}

impl LightCone {
    pub fn new(rounds: usize) -> Self {
        LightCone { rounds, neighbors: Vec::new(), acc: 0, random: false, home: None }
    }
}

impl NodeProgram for LightCone {
    fn randomness_bits(&self, _view: &LocalView) -> usize {
        1
    }

    fn init(&mut self, view: &LocalView, input: Option<&[u8]>, randomness: Vec<bool>) -> qlocal::Result<()> {
        self.neighbors = view.neighbors.clone();
        self.acc = input.and_then(|x| x.first().copied()).unwrap_or(0) & 1;
        self.random = randomness[0];
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> qlocal::Result<Outbox> {
        if t == 0 {
            let a = ctx.alloc()?;
            ctx.apply(Gate::H(a))?;
            ctx.apply(Gate::SPower(self.acc == 1, a))?;
            if self.random {
                ctx.apply(Gate::H(a))?;
            }
            self.home = Some(a);
        }
        let a = self.home.expect("allocated at t = 0");
        for msg in inbox.values() {
            if let Some(&x) = msg.payload.first() {
                self.acc ^= x;
            }
            for &q in &msg.qubits {
                ctx.apply(Gate::Cnot { control: q, target: a })?;
                ctx.apply(Gate::Cs(a, q))?;
                ctx.apply(Gate::H(q))?;
            }
        }
        if t == self.rounds || self.neighbors.is_empty() {
            return Ok(Outbox::new());
        }
        let f = ctx.alloc()?;
        ctx.apply(Gate::H(f))?;
        ctx.apply(Gate::SPower(self.acc == 1, f))?;
        ctx.apply(Gate::Cz(a, f))?;
        let target = self.neighbors[t % self.neighbors.len()];
        Ok(self
            .neighbors
            .iter()
            .map(|&v| {
                let qubits = if v == target { vec![f] } else { Vec::new() };
                (v, Message { payload: vec![self.acc], qubits })
            })
            .collect())
    }

    fn finalize(&self, m: &mut Measurements<'_>) -> qlocal::Result<Vec<u8>> {
        let home = self.home.expect("allocated at t = 0");
        Ok(vec![self.acc, m.measure(home)? as u8])
    }
}

pub fn light_cone_protocol(topology: &Topology, rounds: usize, inputs: BTreeMap<NodeId, Vec<u8>>) -> Protocol {
    Protocol::new(topology.clone(), rounds, Mode::Quantum, move |_| Box::new(LightCone::new(rounds)) as Box<dyn NodeProgram>)
        .with_inputs(inputs)
}

/// Output law of one node, marginalized from the exact joint law.
pub fn node_law(protocol: &Protocol, u: NodeId) -> BTreeMap<Vec<u8>, f64> {
    node_marginal(&protocol.exact_law().unwrap(), u)
}

pub fn node_marginal(law: &BTreeMap<Outputs, f64>, u: NodeId) -> BTreeMap<Vec<u8>, f64> {
    let mut out = BTreeMap::new();
    for (outputs, p) in law {
        *out.entry(outputs[&u].clone()).or_insert(0.0) += p;
    }
    out
}

pub fn max_law_diff(a: &BTreeMap<Vec<u8>, f64>, b: &BTreeMap<Vec<u8>, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}
