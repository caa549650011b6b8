mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{light_cone_protocol, max_law_diff, node_law, random_connected, LightCone};
use qlocal::net::{
    run, Inbox, LocalView, Measurements, Message, Mode, NodeContext, NodeId, NodeProgram, Outbox, Protocol, Topology,
};
use qlocal::quantum::{Gate, QubitId};
use qlocal::Error;

fn path(n: u32) -> Topology {
    Topology::new(0..n, (1..n).map(|i| (i - 1, i))).unwrap()
}

/// Allocates one qubit at `t = 0`, and optionally touches someone else's.
struct Toucher {
    steal: Option<QubitId>,
    send_to: Option<NodeId>,
}

impl NodeProgram for Toucher {
    fn init(&mut self, _v: &LocalView, _i: Option<&[u8]>, _r: Vec<bool>) -> qlocal::Result<()> {
        Ok(())
    }

    fn round(&mut self, t: usize, _inbox: &Inbox, ctx: &mut NodeContext<'_>) -> qlocal::Result<Outbox> {
        if t == 0 {
            let q = ctx.alloc()?;
            ctx.apply(Gate::H(q))?;
        }
        if let (1, Some(q)) = (t, self.steal) {
            ctx.apply(Gate::H(q))?;
        }
        match self.send_to {
            Some(v) if t == 0 => Ok(BTreeMap::from([(v, Message::classical(vec![1]))])),
            _ => Ok(Outbox::new()),
        }
    }

    fn finalize(&self, _m: &mut Measurements<'_>) -> qlocal::Result<Vec<u8>> {
        Ok(Vec::new())
    }
}

fn toucher_programs(n: u32, thief: u32, steal: Option<QubitId>, send_to: Option<NodeId>) -> BTreeMap<NodeId, Box<dyn NodeProgram>> {
    (0..n)
        .map(|u| {
            let p = if u == thief { Toucher { steal, send_to } } else { Toucher { steal: None, send_to: None } };
            (NodeId(u), Box::new(p) as Box<dyn NodeProgram>)
        })
        .collect()
}

#[test]
fn gate_on_foreign_qubit_is_a_locality_error() {
    // Node 0 allocates qubit 0 first; node 1 then tries to use it.
    let programs = toucher_programs(2, 1, Some(QubitId(0)), None);
    let err = run(&path(2), programs, &BTreeMap::new(), 2, 0).unwrap_err();
    assert!(matches!(err, Error::Locality { node: NodeId(1), round: 1, qubit: QubitId(0) }), "{err:?}");
}

#[test]
fn message_to_non_neighbor_is_rejected() {
    let programs = toucher_programs(3, 0, None, Some(NodeId(2)));
    let err = run(&path(3), programs, &BTreeMap::new(), 1, 0).unwrap_err();
    assert!(matches!(err, Error::Protocol { node: NodeId(0), round: 0, .. }), "{err:?}");
}

#[test]
fn message_after_last_round_is_rejected() {
    let programs = toucher_programs(2, 0, None, Some(NodeId(1)));
    let err = run(&path(2), programs, &BTreeMap::new(), 0, 0).unwrap_err();
    assert!(matches!(err, Error::Protocol { .. }), "{err:?}");
}

#[test]
fn quantum_gate_in_classical_mode_is_a_model_violation() {
    let p = Protocol::new(path(2), 1, Mode::Classical, |_| {
        Box::new(Toucher { steal: None, send_to: None }) as Box<dyn NodeProgram>
    });
    assert!(matches!(p.run(0).unwrap_err(), Error::ModelViolation { .. }));
}

/// Two nodes swap identifiers in one round.
struct IdSwap {
    rounds: usize,
    id: u32,
    other: u32,
    peer: Option<NodeId>,
}

impl NodeProgram for IdSwap {
    fn init(&mut self, view: &LocalView, _i: Option<&[u8]>, _r: Vec<bool>) -> qlocal::Result<()> {
        self.id = view.self_id.0;
        self.peer = view.neighbors.first().copied();
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, _ctx: &mut NodeContext<'_>) -> qlocal::Result<Outbox> {
        for m in inbox.values().filter(|m| !m.is_empty()) {
            self.other = u32::from_le_bytes(m.payload[..4].try_into().unwrap());
        }
        match (t, self.peer) {
            (0, Some(v)) if self.rounds > 0 => Ok(BTreeMap::from([(v, Message::classical(self.id.to_le_bytes().to_vec()))])),
            _ => Ok(Outbox::new()),
        }
    }

    fn finalize(&self, _m: &mut Measurements<'_>) -> qlocal::Result<Vec<u8>> {
        Ok(self.other.to_le_bytes().to_vec())
    }
}

fn id_swap() -> Box<dyn NodeProgram> {
    Box::new(IdSwap { rounds: 1, id: 0, other: u32::MAX, peer: None })
}

#[test]
fn two_nodes_exchange_identifiers() {
    let t = Topology::new([17, 400], [(17, 400)]).unwrap();
    let exec = Protocol::new(t, 1, Mode::Classical, |_| id_swap()).run(0).unwrap();
    assert_eq!(exec.outputs[&NodeId(17)], 400u32.to_le_bytes());
    assert_eq!(exec.outputs[&NodeId(400)], 17u32.to_le_bytes());
    assert_eq!(exec.trace.num_rounds(), 1);
    assert_eq!(exec.trace.transfers().count(), 2);
}

#[test]
fn zero_rounds_sees_no_messages() {
    let t = Topology::new([1, 2], [(1, 2)]).unwrap();
    let exec = Protocol::new(t, 0, Mode::Classical, |_| {
        Box::new(IdSwap { rounds: 0, id: 0, other: 9, peer: None }) as Box<dyn NodeProgram>
    })
    .run(0)
    .unwrap();
    assert!(exec.outputs.values().all(|o| o == &9u32.to_le_bytes()));
    assert_eq!(exec.trace.num_rounds(), 0);
}

#[test]
fn disconnected_networks_need_opt_in() {
    let t = Topology::new(0..4, [(0, 1), (2, 3)]).unwrap();
    let p = Protocol::new(t, 1, Mode::Classical, |_| id_swap());
    assert!(matches!(p.run(0), Err(Error::Topology(_))));
    assert!(p.allowing_disconnected().run(0).is_ok());
}

#[test]
fn light_cone_runs_are_deterministic_per_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = random_connected(&mut rng, 5, 0.3);
    let inputs = (0..5).map(|u| (NodeId(u), vec![(u % 2) as u8])).collect();
    let p = light_cone_protocol(&t, 2, inputs);
    let a = p.sample(40, 11).unwrap();
    assert_eq!(a, p.sample(40, 11).unwrap());
    for s in [0u64, 5, 39] {
        assert_eq!(a[s as usize], p.run(qlocal::net::shot_seed(11, s)).unwrap().outputs);
    }
}

#[test]
fn ownership_is_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = random_connected(&mut rng, 5, 0.4);
    let p = light_cone_protocol(&t, 2, BTreeMap::new());
    let randomness = t.nodes().iter().map(|&u| (u, vec![false])).collect();
    let evolved = p.evolve_with(&randomness).unwrap();
    let arena = evolved.arena();
    // One home qubit per node plus one fresh qubit per node per exchange.
    assert_eq!(arena.num_live(), 5 * 3);
    let owned: usize = t.nodes().iter().map(|&u| arena.owned_by(u).len()).sum();
    assert_eq!(owned, arena.num_live());
    for r in evolved.rounds() {
        let sent: usize = r.transfers.iter().map(|x| x.qubits.len()).sum();
        assert_eq!(sent, 5);
    }
}

#[test]
fn output_law_sums_to_one() {
    let t = path(3);
    let law = light_cone_protocol(&t, 1, BTreeMap::new()).exact_law().unwrap();
    assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn randomness_budget_is_enforced() {
    let t = path(4);
    let p = light_cone_protocol(&t, 1, BTreeMap::new()).with_max_random_bits(3);
    assert!(matches!(p.exact_law(), Err(Error::Resource { .. })));
}

fn relabel_law(t: &Topology, map: &BTreeMap<NodeId, NodeId>, rounds: usize) -> (f64, usize) {
    let inputs: BTreeMap<NodeId, Vec<u8>> = t.nodes().iter().map(|&u| (u, vec![(u.0 % 2) as u8])).collect();
    let moved_inputs = inputs.iter().map(|(u, x)| (map[u], x.clone())).collect();
    let moved = t.relabel(map).unwrap();
    let a = light_cone_protocol(t, rounds, inputs);
    let b = light_cone_protocol(&moved, rounds, moved_inputs);
    let mut worst = 0.0f64;
    for &u in t.nodes() {
        worst = worst.max(max_law_diff(&node_law(&a, u), &node_law(&b, map[&u])));
    }
    (worst, t.num_nodes())
}

#[test]
fn order_preserving_relabel_keeps_output_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = random_connected(&mut rng, 4, 0.3);
    let map = t.nodes().iter().map(|&u| (u, NodeId(100 + 7 * u.0))).collect();
    let (diff, _) = relabel_law(&t, &map, 2);
    assert!(diff < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn light_cone_respects_locality(seed in any::<u64>(), n in 2u32..6, rounds in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_connected(&mut rng, n, 0.2);
        let base: BTreeMap<NodeId, Vec<u8>> = t.nodes().iter().map(|&u| (u, vec![0])).collect();
        for &u in t.nodes() {
            let ball = t.neighborhood(u, rounds).unwrap();
            let Some(&far) = t.nodes().iter().find(|v| !ball.contains(v)) else { continue };
            let mut flipped = base.clone();
            flipped.insert(far, vec![1]);
            let a = node_law(&light_cone_protocol(&t, rounds, base.clone()), u);
            let b = node_law(&light_cone_protocol(&t, rounds, flipped), u);
            prop_assert!(max_law_diff(&a, &b) < 1e-12);
        }
    }
}

#[test]
fn light_cone_is_not_trivially_local() {
    let t = path(2);
    let a = node_law(&light_cone_protocol(&t, 1, BTreeMap::from([(NodeId(1), vec![0])])), NodeId(0));
    let b = node_law(&light_cone_protocol(&t, 1, BTreeMap::from([(NodeId(1), vec![1])])), NodeId(0));
    assert!(max_law_diff(&a, &b) > 1e-3);
    let _ = LightCone::new(1);
}
