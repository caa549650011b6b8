//! Full-information flooding and the derandomization of randomized
//! protocols that compute a function.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::net::{
    Inbox, Inputs, LocalView, Measurements, Message, Mode, NodeContext, NodeId, NodeProgram, Outbox, Protocol,
    Topology,
};

/// Inputs a node has collected, keyed by the node they belong to.
pub type Knowledge = BTreeMap<NodeId, Vec<u8>>;

/// Output rule of a flooding node: its identifier, what it collected and
/// its random bits.
pub type FloodRule = Arc<dyn Fn(NodeId, &Knowledge, &[bool]) -> Result<Vec<u8>> + Send + Sync>;

/// Law of a node's output given the inputs in its neighborhood.
pub trait OutputOracle: Send + Sync {
    fn output_law(&self, node: NodeId, knowledge: &Knowledge) -> Result<BTreeMap<Vec<u8>, f64>>;
}

impl<F> OutputOracle for F
where
    F: Fn(NodeId, &Knowledge) -> Result<BTreeMap<Vec<u8>, f64>> + Send + Sync,
{
    fn output_law(&self, node: NodeId, knowledge: &Knowledge) -> Result<BTreeMap<Vec<u8>, f64>> {
        self(node, knowledge)
    }
}

/// Floods every known input for `rounds` rounds, so that afterwards each
/// node knows exactly the inputs within distance `rounds`, then applies
/// its rule.
pub struct FloodProgram {
    rule: FloodRule,
    random_bits: usize,
    rounds: usize,
    id: NodeId,
    known: Knowledge,
    randomness: Vec<bool>,
}

impl FloodProgram {
    pub fn new(rule: FloodRule, random_bits: usize, rounds: usize) -> Self {
        FloodProgram { rule, random_bits, rounds, id: NodeId(0), known: Knowledge::new(), randomness: Vec::new() }
    }
}

impl NodeProgram for FloodProgram {
    fn randomness_bits(&self, _view: &LocalView) -> usize {
        self.random_bits
    }

    fn init(&mut self, view: &LocalView, input: Option<&[u8]>, randomness: Vec<bool>) -> Result<()> {
        self.id = view.self_id;
        if let Some(x) = input {
            self.known.insert(view.self_id, x.to_vec());
        }
        self.randomness = randomness;
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> Result<Outbox> {
        for (&v, msg) in inbox {
            if msg.payload.is_empty() {
                continue;
            }
            let theirs: Knowledge = serde_json::from_slice(&msg.payload).map_err(|e| Error::Protocol {
                node: ctx.node(),
                round: t,
                reason: format!("unreadable message from {v}: {e}"),
            })?;
            self.known.extend(theirs);
        }
        if t == self.rounds {
            return Ok(Outbox::new());
        }
        let payload = serde_json::to_vec(&self.known)?;
        Ok(inbox.keys().map(|&v| (v, Message::classical(payload.clone()))).collect())
    }

    fn finalize(&self, _m: &mut Measurements<'_>) -> Result<Vec<u8>> {
        (self.rule)(self.id, &self.known, &self.randomness)
    }
}

/// Classical flooding protocol with `random_bits` bits per node.
pub fn flood_protocol(topology: &Topology, rounds: usize, random_bits: usize, rule: FloodRule) -> Protocol {
    Protocol::new(topology.clone(), rounds, Mode::Classical, move |_| {
        Box::new(FloodProgram::new(Arc::clone(&rule), random_bits, rounds)) as Box<dyn NodeProgram>
    })
}

/// Most likely output of `law`. Ties within `1e-12` are an error, since a
/// protocol that is correct with probability above 1/2 has a unique mode.
pub fn mode_of(node: NodeId, law: &BTreeMap<Vec<u8>, f64>) -> Result<Vec<u8>> {
    let mut ranked: Vec<(&Vec<u8>, f64)> = law.iter().map(|(k, &p)| (k, p)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    match ranked[..] {
        [] => Err(Error::arg(format!("empty output law at node {node}"))),
        [(best, p), (_, q), ..] if (p - q).abs() <= 1e-12 => Err(Error::Protocol {
            node,
            round: 0,
            reason: format!("output law has no unique mode (tie at {p}, first value {best:?})"),
        }),
        [(best, _), ..] => Ok(best.clone()),
    }
}

/// Deterministic protocol: flood for `rounds` rounds, then output the mode
/// of the oracle's law for the collected inputs.
pub fn derandomize_function_protocol(topology: &Topology, oracle: Arc<dyn OutputOracle>, rounds: usize) -> Protocol {
    let rule: FloodRule = Arc::new(move |u, known, _| mode_of(u, &oracle.output_law(u, known)?));
    flood_protocol(topology, rounds, 0, rule)
}

/// Oracle backed by exact enumeration of a reference protocol. Inputs
/// outside the collected neighborhood are set to `filler`; the reference
/// protocol's locality makes the choice irrelevant.
pub struct ProtocolOracle {
    build: Box<dyn Fn(&Inputs) -> Result<Protocol> + Send + Sync>,
    nodes: Vec<NodeId>,
    filler: Vec<u8>,
    cache: Mutex<HashMap<(NodeId, Knowledge), BTreeMap<Vec<u8>, f64>>>,
}

impl ProtocolOracle {
    pub fn new(
        nodes: Vec<NodeId>,
        filler: Vec<u8>,
        build: impl Fn(&Inputs) -> Result<Protocol> + Send + Sync + 'static,
    ) -> Self {
        ProtocolOracle { build: Box::new(build), nodes, filler, cache: Mutex::new(HashMap::new()) }
    }
}

impl OutputOracle for ProtocolOracle {
    fn output_law(&self, node: NodeId, knowledge: &Knowledge) -> Result<BTreeMap<Vec<u8>, f64>> {
        let key = (node, knowledge.clone());
        if let Some(law) = self.cache.lock().expect("oracle cache").get(&key) {
            return Ok(law.clone());
        }
        let mut inputs: Inputs = self.nodes.iter().map(|&u| (u, self.filler.clone())).collect();
        inputs.extend(knowledge.iter().map(|(&u, x)| (u, x.clone())));
        let mut law = BTreeMap::new();
        for (outputs, p) in (self.build)(&inputs)?.exact_law()? {
            *law.entry(outputs[&node].clone()).or_insert(0.0) += p;
        }
        self.cache.lock().expect("oracle cache").insert(key, law.clone());
        Ok(law)
    }
}

/// XOR of bit 0 of every collected input.
pub fn xor_of_inputs(known: &Knowledge) -> Vec<u8> {
    vec![known.values().fold(0u8, |acc, x| acc ^ (x.first().copied().unwrap_or(0) & 1))]
}

/// Randomized reference protocol: floods for `rounds` rounds and outputs
/// `f` of what it collected, with bit 0 flipped when both of its two
/// random bits are 1 (probability 1/4).
pub fn noisy_function_protocol(
    topology: &Topology,
    rounds: usize,
    f: impl Fn(&Knowledge) -> Vec<u8> + Send + Sync + 'static,
) -> Protocol {
    let rule: FloodRule = Arc::new(move |_, known, r| {
        let mut out = f(known);
        if r[0] && r[1] {
            if let Some(x) = out.first_mut() {
                *x ^= 1;
            }
        }
        Ok(out)
    });
    flood_protocol(topology, rounds, 2, rule)
}
