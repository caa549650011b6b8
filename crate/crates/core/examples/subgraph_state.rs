//! Two-round distributed construction of an induced-subgraph graph state.

use std::collections::BTreeMap;

use qlocal::net::{build_script_gd, NodeId};
use qlocal::protocols::check_subgraph_state;

fn main() -> qlocal::Result<()> {
    let net = build_script_gd(2)?;
    let on: BTreeMap<NodeId, bool> = net.topology.nodes().iter().map(|&u| (u, u.0 % 3 != 1)).collect();
    let check = check_subgraph_state(&net.topology, &on)?;
    println!("nodes switched on: {:?}", on.iter().filter(|(_, &c)| c).map(|(u, _)| u.0).collect::<Vec<_>>());
    println!("fidelity {:.12} after {} rounds", check.fidelity, check.rounds);
    println!("at most {} register(s) per message", check.max_registers_per_message);
    Ok(())
}
