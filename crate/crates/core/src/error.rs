use thiserror::Error;

use crate::net::NodeId;
use crate::quantum::QubitId;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A size limit (qubit cap, support cap, randomness budget) was exceeded.
    #[error("resource limit exceeded: {what} (limit {limit}, requested {requested})")]
    Resource {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A node touched a qubit it does not own.
    #[error("locality violation: node {node} used qubit {qubit} in round {round} without owning it")]
    Locality {
        node: NodeId,
        round: usize,
        qubit: QubitId,
    },

    /// Malformed protocol behavior: message to a non-neighbor, double send, etc.
    #[error("protocol error at node {node}, round {round}: {reason}")]
    Protocol {
        node: NodeId,
        round: usize,
        reason: String,
    },

    /// Quantum operation attempted in a classical-only execution.
    #[error("model violation: node {node} attempted a quantum operation in a classical execution")]
    ModelViolation { node: NodeId },

    #[error("qubit {0} cannot be disposed: it is entangled with other qubits")]
    EntangledDisposal(QubitId),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
