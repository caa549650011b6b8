mod common;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlocal::net::{build_script_gd, NodeId};
use qlocal::protocols::{
    affine_protocol, affine_sampling_protocol, check_subgraph_state, copies_topology, copy_size, k_copies_protocol,
    relation_output, relation_protocol, AffineOptions, AffineStrategy, CopyStrategy, TriangleInput, SUBGRAPH_ROUNDS,
};
use qlocal::verify::{is_valid, strategy_successes};
use qlocal::Error;

#[test]
fn subgraph_state_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let n = rng.gen_range(1..=6);
        let t = common::random_graph(&mut rng, n, 0.5);
        let c: BTreeMap<NodeId, bool> = t.nodes().iter().map(|&u| (u, rng.gen())).collect();
        let chk = check_subgraph_state(&t, &c).unwrap();
        assert!(chk.fidelity > 1.0 - 1e-9, "fidelity {}", chk.fidelity);
        assert_eq!(chk.rounds, SUBGRAPH_ROUNDS);
        assert!(chk.max_registers_per_message <= 1);
    }
}

#[test]
fn relation_protocol_uses_two_rounds_and_no_leftover_qubits() {
    let exec = relation_protocol(2, TriangleInput::from_index(3)).unwrap().run(1).unwrap();
    assert_eq!(exec.trace.num_rounds(), 2);
    let x = relation_output(2, &exec.outputs, 0).unwrap();
    assert!(is_valid(2, TriangleInput::from_index(3), &x).unwrap().in_support);
}

#[test]
fn relation_protocol_is_valid_on_many_seeds() {
    for b in TriangleInput::all() {
        for outputs in relation_protocol(4, b).unwrap().sample(60, 99).unwrap() {
            let x = relation_output(4, &outputs, 0).unwrap();
            assert!(is_valid(4, b, &x).unwrap().in_support, "b={b} x={x}");
        }
    }
}

#[test]
fn affine_replay_matches_the_parity_count() {
    // Every admissible strategy that needs at most two rounds, replayed on
    // the network, is valid on exactly the inputs its parities predict.
    let d = 4;
    let mut checked = 0;
    for s in AffineStrategy::all().filter(|s| s.is_admissible()).step_by(37) {
        let mut ok = 0;
        for b in TriangleInput::all() {
            let exec = affine_protocol(d, s, 2, b).unwrap().run(0).unwrap();
            let x = relation_output(d, &exec.outputs, 0).unwrap();
            ok += is_valid(d, b, &x).unwrap().in_support as usize;
        }
        assert_eq!(ok, strategy_successes(&s), "{s}");
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn affine_round_caps() {
    let s = AffineStrategy::from_code(1 << 5);
    assert_eq!(s.required_rounds(), 2);
    assert!(affine_protocol(4, s, 1, TriangleInput::from_index(0)).is_err());
    assert!(affine_protocol(4, s, 3, TriangleInput::from_index(0)).is_err());
    assert!(affine_protocol(2, AffineStrategy::default(), 2, TriangleInput::from_index(0)).is_err());
    let randomized = AffineOptions { coset_fill: true, ..AffineOptions::default() };
    assert!(affine_sampling_protocol(4, AffineStrategy::default(), 0, randomized).is_err());
    assert!(affine_sampling_protocol(4, AffineStrategy::default(), 1, randomized).is_ok());
}

#[test]
fn copies_are_disjoint() {
    let t = copies_topology(2, 3).unwrap();
    let one = build_script_gd(2).unwrap().topology;
    assert_eq!(t.num_nodes(), 3 * copy_size(2));
    assert_eq!(t.num_edges(), 3 * one.num_edges());
    assert_eq!(t.components().len(), 3);
    assert!(matches!(copies_topology(2, 0), Err(Error::Argument(_))));
}

#[test]
fn quantum_copies_are_each_valid() {
    let inputs = [TriangleInput::from_index(0), TriangleInput::from_index(6)];
    let p = k_copies_protocol(2, &inputs, CopyStrategy::Quantum).unwrap();
    for outputs in p.sample(30, 4).unwrap() {
        for (c, &b) in inputs.iter().enumerate() {
            let x = relation_output(2, &outputs, c).unwrap();
            assert!(is_valid(2, b, &x).unwrap().in_support);
        }
    }
}

#[test]
fn input_parsing() {
    let b: TriangleInput = "1,0,1".parse().unwrap();
    assert_eq!(b, TriangleInput::new(true, false, true));
    assert_eq!(b.to_string(), "101");
    assert!("12".parse::<TriangleInput>().is_err());
}
