use std::collections::{BTreeMap, BTreeSet};

use super::{NodeId, QuantumArena};
use crate::error::{Error, Result};
use crate::quantum::{Gate, QubitId};

/// Everything a node knows about the network: its identifier, its
/// neighbors and the number of nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalView {
    pub self_id: NodeId,
    /// Neighbor identifiers in ascending order.
    pub neighbors: Vec<NodeId>,
    pub num_nodes: usize,
}

impl LocalView {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

/// One message along one edge direction in one round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Message {
    pub payload: Vec<u8>,
    /// Qubits whose ownership moves to the receiver at the round boundary.
    pub qubits: Vec<QubitId>,
}

impl Message {
    pub fn classical(payload: Vec<u8>) -> Self {
        Message { payload, qubits: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty() && self.qubits.is_empty()
    }
}

/// Received messages, one per neighbor. A neighbor that sent nothing
/// appears with an empty message.
pub type Inbox = BTreeMap<NodeId, Message>;
/// Messages to send. Missing neighbors receive an empty message.
pub type Outbox = BTreeMap<NodeId, Message>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Classical,
    Quantum,
}

/// Per-node behavior in a synchronous execution.
///
/// For a `T`-round execution, `round` is called for `t = 0, 1, ..., T`.
/// The outbox returned at `t < T` is delivered before call `t + 1`; the
/// outbox at `t = T` must be empty. The inbox at `t = 0` holds only empty
/// messages.
pub trait NodeProgram: Send {
    /// Number of uniformly random bits handed to `init`.
    fn randomness_bits(&self, _view: &LocalView) -> usize {
        0
    }

    fn init(&mut self, view: &LocalView, input: Option<&[u8]>, randomness: Vec<bool>) -> Result<()>;

    fn round(&mut self, t: usize, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> Result<Outbox>;

    /// Produces the node's output, measuring owned qubits through `m` if
    /// needed. Called once per shot after the last round.
    fn finalize(&self, m: &mut Measurements<'_>) -> Result<Vec<u8>>;
}

/// Quantum operations available to a node during `round`.
pub struct NodeContext<'a> {
    node: NodeId,
    round: usize,
    mode: Mode,
    arena: &'a mut QuantumArena,
}

impl<'a> NodeContext<'a> {
    pub(crate) fn new(node: NodeId, round: usize, mode: Mode, arena: &'a mut QuantumArena) -> Self {
        NodeContext { node, round, mode, arena }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn round(&self) -> usize {
        self.round
    }

    fn quantum(&self) -> Result<()> {
        match self.mode {
            Mode::Quantum => Ok(()),
            Mode::Classical => Err(Error::ModelViolation { node: self.node }),
        }
    }

    fn check_owned(&self, q: QubitId) -> Result<()> {
        if self.arena.owner(q) == Some(self.node) {
            Ok(())
        } else {
            Err(Error::Locality { node: self.node, round: self.round, qubit: q })
        }
    }

    /// Creates a qubit in `|0⟩` owned by this node.
    pub fn alloc(&mut self) -> Result<QubitId> {
        self.quantum()?;
        Ok(self.arena.alloc(self.node))
    }

    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        self.quantum()?;
        for q in gate.targets() {
            self.check_owned(q)?;
        }
        self.arena.apply(&gate)
    }

    /// Discards an owned qubit that is in a product state with the rest.
    pub fn dispose(&mut self, q: QubitId) -> Result<()> {
        self.quantum()?;
        self.check_owned(q)?;
        self.arena.dispose(q)
    }

    pub fn owns(&self, q: QubitId) -> bool {
        self.arena.owner(q) == Some(self.node)
    }

    pub fn owned(&self) -> Vec<QubitId> {
        self.arena.owned_by(self.node)
    }
}

pub(crate) enum Outcomes<'a> {
    /// Records which qubits are measured; every outcome reads as 0.
    Probe,
    Fixed(&'a BTreeMap<QubitId, bool>),
}

/// Terminal computational-basis measurement of owned qubits.
pub struct Measurements<'a> {
    node: NodeId,
    round: usize,
    mode: Mode,
    arena: &'a QuantumArena,
    outcomes: Outcomes<'a>,
    measured: BTreeSet<QubitId>,
}

impl<'a> Measurements<'a> {
    pub(crate) fn new(
        node: NodeId,
        round: usize,
        mode: Mode,
        arena: &'a QuantumArena,
        outcomes: Outcomes<'a>,
    ) -> Self {
        Measurements { node, round, mode, arena, outcomes, measured: BTreeSet::new() }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn measure(&mut self, q: QubitId) -> Result<bool> {
        if self.mode == Mode::Classical {
            return Err(Error::ModelViolation { node: self.node });
        }
        if self.arena.owner(q) != Some(self.node) {
            return Err(Error::Locality { node: self.node, round: self.round, qubit: q });
        }
        self.measured.insert(q);
        Ok(match self.outcomes {
            Outcomes::Probe => false,
            Outcomes::Fixed(map) => map[&q],
        })
    }

    pub(crate) fn into_measured(self) -> BTreeSet<QubitId> {
        self.measured
    }
}
