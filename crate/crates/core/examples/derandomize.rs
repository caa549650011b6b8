//! Turning a randomized protocol that is right with probability 3/4 into a
//! deterministic one with the same round count.

use std::sync::Arc;

use qlocal::net::{NodeId, Topology};
use qlocal::protocols::{derandomize_function_protocol, noisy_function_protocol, xor_of_inputs, OutputOracle, ProtocolOracle};

fn main() -> qlocal::Result<()> {
    let cycle = Topology::new(0..4, [(0, 1), (1, 2), (2, 3), (3, 0)])?;
    let reference = cycle.clone();
    let oracle: Arc<dyn OutputOracle> = Arc::new(ProtocolOracle::new(cycle.nodes().to_vec(), vec![0], move |inputs| {
        Ok(noisy_function_protocol(&reference, 2, xor_of_inputs).with_inputs(inputs.clone()))
    }));
    let protocol = derandomize_function_protocol(&cycle, oracle, 2);
    for x in 0u8..16 {
        let inputs = (0..4).map(|u| (NodeId(u), vec![(x >> u) & 1])).collect();
        let exec = protocol.clone().with_inputs(inputs).run(0)?;
        let outs: Vec<u8> = exec.outputs.values().map(|o| o[0]).collect();
        println!("x={x:04b} xor={} outputs={outs:?}", x.count_ones() % 2);
    }
    Ok(())
}
