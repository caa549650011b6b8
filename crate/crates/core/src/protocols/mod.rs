//! Node programs for the graph-state construction, the triangle relation
//! and sampling protocols, classical affine strategies and the
//! derandomization transformer.

mod affine;
mod derandomize;
mod input;
mod subgraph;
mod triangle;

pub use affine::{affine_protocol, affine_sampling_protocol, AffineOptions, AffineProgram, AffineStrategy};
pub use derandomize::{
    derandomize_function_protocol, flood_protocol, mode_of, noisy_function_protocol, xor_of_inputs, FloodProgram,
    FloodRule, Knowledge, OutputOracle, ProtocolOracle,
};
pub use input::TriangleInput;
pub use subgraph::{
    check_subgraph_state, subgraph_protocol, subgraph_state_program, SubgraphCheck, SubgraphProgram, SUBGRAPH_ROUNDS,
};
pub use triangle::{
    copies_topology, copy_size, k_copies_protocol, process_pd, relation_output, relation_protocol, relation_schema,
    sample_record, sample_schema, sampling_protocol, triangle_inputs, CopyStrategy, TriangleMode, TriangleProgram,
    TRIANGLE_ROUNDS,
};
