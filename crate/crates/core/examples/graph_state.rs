//! Build the graph state of a small graph and look at its outcome law.

use qlocal::net::Topology;
use qlocal::quantum::{apply_gate, build_graph_state, Gate, QubitId};

fn main() -> qlocal::Result<()> {
    let triangle = Topology::new(0..3, [(0, 1), (1, 2), (0, 2)])?;
    let mut state = build_graph_state(&triangle)?;
    println!("graph state on {} qubits, norm {:.12}", state.num_qubits(), state.norm_sqr());

    // In the X basis every vertex stabilizer fixes a parity.
    for q in 0..3 {
        state = apply_gate(state, &Gate::H(QubitId(q)))?;
    }
    for (x, p) in state.exact_distribution().iter() {
        println!("  {x}  {p:.4}");
    }
    Ok(())
}
