//! Exact statevector engine: the five gates used by the protocols,
//! computational-basis measurement, exact output laws and supports.
//!
//! Qubit `k` of a [`StateVector`] is bit `k` of the amplitude index
//! (little-endian), so a [`Bitstring`] sampled from a state has the same
//! packed value as the amplitude index it came from.

mod bits;
mod gate;
pub(crate) mod state;

pub use bits::Bitstring;
pub use gate::{Gate, GateKind};
pub use state::{
    apply_gate, build_graph_state, fidelity, new_state, StateVector, DEFAULT_MAX_QUBITS,
    DEFAULT_SUPPORT_TOL,
};

use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque qubit label.
///
/// Inside a standalone [`StateVector`] the label is the tensor position.
/// Inside a [`crate::net::QuantumArena`] it is the creation index and the
/// arena maps it to a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub u32);

impl QubitId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

impl From<usize> for QubitId {
    fn from(i: usize) -> Self {
        QubitId(i as u32)
    }
}
