//! Synchronous LOCAL-model execution: topologies, node programs, classical
//! messages, and quantum messages realized as transfer of qubit ownership
//! inside one shared [`QuantumArena`].

mod arena;
mod engine;
mod gd;
mod program;
mod topology;
mod trace;

pub use arena::{ArenaLimits, MeasurementTable, QuantumArena};
pub use engine::{
    node_randomness, run, shot_seed, Evolved, Execution, Inputs, Outputs, ProgramFactory, Protocol,
    DEFAULT_MAX_RANDOM_BITS,
};
pub use gd::{build_gd, build_script_gd, role_of, GdNetwork, Partition, Role};
pub use program::{Inbox, LocalView, Measurements, Message, Mode, NodeContext, NodeProgram, Outbox};
pub use topology::{neighborhood, NodeId, Topology};
pub use trace::{ExecutionTrace, RoundRecord, TransferRecord};
