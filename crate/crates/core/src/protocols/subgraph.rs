//! Two-round construction of the graph state of an induced subgraph.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::net::{
    Evolved, Inbox, Inputs, LocalView, Measurements, Message, Mode, NodeContext, NodeId, NodeProgram, Outbox,
    Protocol, Topology,
};
use crate::quantum::{build_graph_state, fidelity, Gate, QubitId};

pub const SUBGRAPH_ROUNDS: usize = 2;

fn protocol_error(ctx: &NodeContext<'_>, reason: impl Into<String>) -> Error {
    Error::Protocol { node: ctx.node(), round: ctx.round(), reason: reason.into() }
}

/// Register bookkeeping of one node. Each step corresponds to one compute
/// phase; the first payload byte of every round-1 message is `c_u`, any
/// further bytes are caller data carried alongside.
#[derive(Clone, Debug, Default)]
pub(crate) struct RegisterExchange {
    c: bool,
    q: Option<QubitId>,
    outgoing: BTreeMap<NodeId, QubitId>,
}

impl RegisterExchange {
    pub(crate) fn new(c: bool) -> Self {
        RegisterExchange { c, ..Default::default() }
    }

    /// Prepare `Q_u` and one copy register per neighbor; send the copies.
    pub(crate) fn start(&mut self, view: &LocalView, ctx: &mut NodeContext<'_>, extra: &[u8]) -> Result<Outbox> {
        let q = ctx.alloc()?;
        ctx.apply(Gate::H(q))?;
        let mut outbox = Outbox::new();
        for &v in &view.neighbors {
            let r = ctx.alloc()?;
            ctx.apply(Gate::Cnot { control: q, target: r })?;
            self.outgoing.insert(v, r);
            let mut payload = vec![self.c as u8];
            payload.extend_from_slice(extra);
            outbox.insert(v, Message { payload, qubits: vec![r] });
        }
        self.q = Some(q);
        Ok(outbox)
    }

    /// Controlled-S against each neighbor's copy when both indicators are
    /// set, then return the copies. Yields each neighbor's extra bytes.
    pub(crate) fn exchange(
        &mut self,
        inbox: &Inbox,
        ctx: &mut NodeContext<'_>,
    ) -> Result<(Outbox, BTreeMap<NodeId, Vec<u8>>)> {
        let q = self.q.ok_or_else(|| protocol_error(ctx, "exchange before start"))?;
        let mut outbox = Outbox::new();
        let mut extras = BTreeMap::new();
        for (&v, msg) in inbox {
            let (&[r], Some((&c_v, extra))) = (msg.qubits.as_slice(), msg.payload.split_first()) else {
                return Err(protocol_error(ctx, format!("malformed register message from {v}")));
            };
            if self.c && c_v != 0 {
                ctx.apply(Gate::Cs(q, r))?;
            }
            outbox.insert(v, Message { payload: Vec::new(), qubits: vec![r] });
            extras.insert(v, extra.to_vec());
        }
        Ok((outbox, extras))
    }

    /// Uncompute every returned copy and discard it.
    pub(crate) fn finish(&mut self, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> Result<QubitId> {
        let q = self.q.ok_or_else(|| protocol_error(ctx, "finish before start"))?;
        for (&v, msg) in inbox {
            let expected = self.outgoing.get(&v).copied();
            if msg.qubits.len() != 1 || Some(msg.qubits[0]) != expected {
                return Err(protocol_error(ctx, format!("register from {v} was not returned")));
            }
            let r = msg.qubits[0];
            ctx.apply(Gate::Cnot { control: q, target: r })?;
            ctx.dispose(r)?;
        }
        self.outgoing.clear();
        Ok(q)
    }
}

/// Node program of the subgraph construction. The indicator `c_u` is
/// either fixed at construction or read from the first input byte.
#[derive(Clone, Debug, Default)]
pub struct SubgraphProgram {
    fixed: Option<bool>,
    view: Option<LocalView>,
    regs: RegisterExchange,
}

impl SubgraphProgram {
    pub fn from_input() -> Self {
        SubgraphProgram::default()
    }
}

/// Node program with a fixed indicator bit.
pub fn subgraph_state_program(c: bool) -> SubgraphProgram {
    SubgraphProgram { fixed: Some(c), ..Default::default() }
}

impl NodeProgram for SubgraphProgram {
    fn init(&mut self, view: &LocalView, input: Option<&[u8]>, _randomness: Vec<bool>) -> Result<()> {
        let c = match (self.fixed, input) {
            (Some(c), _) => c,
            (None, Some([c, ..])) => *c != 0,
            (None, _) => false,
        };
        self.regs = RegisterExchange::new(c);
        self.view = Some(view.clone());
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> Result<Outbox> {
        match t {
            0 => {
                let view = self.view.as_ref().expect("init runs first");
                self.regs.start(view, ctx, &[])
            }
            1 => Ok(self.regs.exchange(inbox, ctx)?.0),
            2 => {
                self.regs.finish(inbox, ctx)?;
                Ok(Outbox::new())
            }
            _ => Err(protocol_error(ctx, "the construction uses exactly two rounds")),
        }
    }

    fn finalize(&self, _m: &mut Measurements<'_>) -> Result<Vec<u8>> {
        Ok(Vec::new())
    }
}

/// The construction on `topology` with indicator `c[u]` at node `u`
/// (missing nodes get 0).
pub fn subgraph_protocol(topology: &Topology, c: &BTreeMap<NodeId, bool>) -> Protocol {
    let inputs: Inputs = c.iter().map(|(&u, &b)| (u, vec![b as u8])).collect();
    Protocol::new(topology.clone(), SUBGRAPH_ROUNDS, Mode::Quantum, |_| {
        Box::new(SubgraphProgram::from_input()) as Box<dyn NodeProgram>
    })
    .with_inputs(inputs)
    .allowing_disconnected()
}

/// Outcome of running the construction and comparing with the reference.
#[derive(Clone, Debug)]
pub struct SubgraphCheck {
    /// Fidelity of the final network state with the reference state.
    pub fidelity: f64,
    /// Exchange rounds recorded in the trace.
    pub rounds: usize,
    /// Register transfers per edge direction per round.
    pub max_registers_per_message: usize,
}

/// Runs the construction and compares the `Q_u` registers, ordered by
/// node, with the graph state of the subgraph induced by `{u : c_u = 1}`
/// (nodes outside it in `|+⟩`). Fails if any copy register could not be
/// discarded.
pub fn check_subgraph_state(topology: &Topology, c: &BTreeMap<NodeId, bool>) -> Result<SubgraphCheck> {
    let evolved: Evolved = subgraph_protocol(topology, c).evolve_with(&BTreeMap::new())?;
    let arena = evolved.arena();
    let mut order = Vec::with_capacity(topology.num_nodes());
    for &u in topology.nodes() {
        match arena.owned_by(u)[..] {
            [q] => order.push(q),
            _ => return Err(Error::arg(format!("node {u} does not hold exactly one register"))),
        }
    }
    let state = arena.state_vector(&order)?;
    let on = |u: NodeId| c.get(&u).copied().unwrap_or(false);
    let induced = topology.filter_edges(|a, b| on(a) && on(b));
    let reference = build_graph_state(&induced)?;
    let max_registers_per_message =
        evolved.rounds().iter().flat_map(|r| r.transfers.iter()).map(|t| t.qubits.len()).max().unwrap_or(0);
    Ok(SubgraphCheck {
        fidelity: fidelity(&state, &reference)?,
        rounds: evolved.rounds().len(),
        max_registers_per_message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_on(t: &Topology, on: bool) -> BTreeMap<NodeId, bool> {
        t.nodes().iter().map(|&u| (u, on)).collect()
    }

    #[test]
    fn two_path_gives_its_graph_state() {
        let t = Topology::new([0, 1], [(0, 1)]).unwrap();
        let check = check_subgraph_state(&t, &all_on(&t, true)).unwrap();
        assert!((check.fidelity - 1.0).abs() < 1e-12);
        assert_eq!(check.rounds, 2);
        assert_eq!(check.max_registers_per_message, 1);
    }

    #[test]
    fn two_path_trace_moves_one_register_per_direction_per_round() {
        let t = Topology::new([0, 1], [(0, 1)]).unwrap();
        let exec = subgraph_protocol(&t, &all_on(&t, true)).run(1).unwrap();
        assert_eq!(exec.trace.num_rounds(), 2);
        for r in &exec.trace.rounds {
            assert_eq!(r.transfers.len(), 2);
            assert!(r.transfers.iter().all(|x| x.qubits.len() == 1));
        }
    }

    #[test]
    fn all_zero_indicators_leave_plus_states() {
        let t = Topology::new(0..4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let check = check_subgraph_state(&t, &all_on(&t, false)).unwrap();
        assert!((check.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_indicator_program_ignores_input() {
        let t = Topology::new([0, 1], [(0, 1)]).unwrap();
        let p = Protocol::new(t, 2, Mode::Quantum, |_| Box::new(subgraph_state_program(true)) as Box<dyn NodeProgram>);
        let evolved = p.evolve_with(&BTreeMap::new()).unwrap();
        assert_eq!(evolved.arena().num_live(), 2);
    }
}
