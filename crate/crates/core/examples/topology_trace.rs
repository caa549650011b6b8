//! Export the augmented ring, reload it, and record a message trace.

use qlocal::net::{build_script_gd, Topology};
use qlocal::protocols::{relation_protocol, TriangleInput};

fn main() -> qlocal::Result<()> {
    let dir = std::env::temp_dir().join("qlocal-topology-trace");
    std::fs::create_dir_all(&dir)?;
    let net = build_script_gd(2)?;
    let path = dir.join("g2.json");
    net.topology.save(&path)?;
    let back = Topology::load(&path)?;
    println!("{} nodes, {} edges, reload equal: {}", back.num_nodes(), back.num_edges(), back == net.topology);

    let exec = relation_protocol(2, "011".parse::<TriangleInput>()?)?.run(3)?;
    let trace = dir.join("trace.jsonl");
    std::fs::write(&trace, exec.trace.to_jsonl())?;
    println!("{} transfers over {} rounds -> {}", exec.trace.transfers().count(), exec.trace.num_rounds(), trace.display());
    Ok(())
}
