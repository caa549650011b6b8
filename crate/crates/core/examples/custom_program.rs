//! A hand-written node program: every node learns its neighbors' ids.

use std::collections::BTreeMap;

use qlocal::net::{run, Inbox, LocalView, Measurements, Message, NodeContext, NodeId, NodeProgram, Outbox, Topology};

#[derive(Default)]
struct Hello {
    id: u32,
    neighbors: Vec<NodeId>,
    heard: Vec<u32>,
}

impl NodeProgram for Hello {
    fn init(&mut self, view: &LocalView, _input: Option<&[u8]>, _randomness: Vec<bool>) -> qlocal::Result<()> {
        self.id = view.self_id.0;
        self.neighbors = view.neighbors.clone();
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, _ctx: &mut NodeContext<'_>) -> qlocal::Result<Outbox> {
        self.heard.extend(inbox.values().filter(|m| !m.is_empty()).map(|m| m.payload[0] as u32));
        if t > 0 {
            return Ok(Outbox::new());
        }
        Ok(self.neighbors.iter().map(|&v| (v, Message::classical(vec![self.id as u8]))).collect())
    }

    fn finalize(&self, _m: &mut Measurements<'_>) -> qlocal::Result<Vec<u8>> {
        Ok(self.heard.iter().map(|&x| x as u8).collect())
    }
}

fn main() -> qlocal::Result<()> {
    let star = Topology::new([10, 20, 30, 40], [(10, 20), (10, 30), (10, 40)])?;
    let programs: BTreeMap<NodeId, Box<dyn NodeProgram>> =
        star.nodes().iter().map(|&u| (u, Box::new(Hello::default()) as Box<dyn NodeProgram>)).collect();
    let exec = run(&star, programs, &BTreeMap::new(), 1, 0)?;
    for (u, heard) in &exec.outputs {
        println!("node {u} heard {heard:?}");
    }
    println!("{} transfers in {} round(s)", exec.trace.transfers().count(), exec.trace.num_rounds());
    Ok(())
}
