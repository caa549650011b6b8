use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use qlocal::net::build_script_gd;
use qlocal::protocols::{flood_protocol, FloodRule, TriangleInput};
use qlocal::quantum::Bitstring;
use qlocal::verify::{
    check_prop1, classical_success_rate, enumerate_support, is_valid, parities, parse_support_file, SupportCache,
};

#[test]
fn validity_and_parity_agree_on_random_strings() {
    // Support membership implies the parity conditions, and at these sizes
    // the parity conditions also imply membership.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in [2usize, 4] {
        for _ in 0..10_000 {
            let b = TriangleInput::from_index(rng.gen_range(0..8));
            let x = Bitstring::new(3 * d, rng.gen::<u64>() & ((1 << (3 * d)) - 1)).unwrap();
            let r = is_valid(d, b, &x).unwrap();
            assert_eq!(r.in_support, r.prop1_ok, "d={d} b={b} x={x}");
        }
    }
}

#[test]
fn support_sizes_match_parity_cosets() {
    for d in [2usize, 4] {
        for b in TriangleInput::all() {
            let n = enumerate_support(d, b).unwrap().len();
            let expected = if b.is_special() { 1 << (3 * d - 2) } else { 1 << (3 * d - 1) };
            assert_eq!(n, expected, "d={d} b={b}");
            let coset = (0u64..1 << (3 * d))
                .filter(|&v| check_prop1(b, parities(d, &Bitstring::new(3 * d, v).unwrap()).unwrap()))
                .count();
            assert_eq!(coset, n);
        }
    }
}

fn reflect(d: usize, x: &Bitstring) -> Bitstring {
    let n = 3 * d;
    let bits: Vec<bool> = (0..n).map(|i| x.bit((n - i) % n)).collect();
    Bitstring::from_bits(&bits).unwrap()
}

#[test]
fn reflection_symmetry_when_b1_equals_b2() {
    // v_i -> v_{-i} fixes v_0 and swaps the other two corners.
    let d = 2;
    for b in TriangleInput::all().filter(|b| b.b[1] == b.b[2]) {
        let s = enumerate_support(d, b).unwrap();
        assert!(s.iter().all(|x| s.contains(&reflect(d, x))), "b={b}");
    }
    let swapped = |b: TriangleInput| TriangleInput::new(b.b[0], b.b[2], b.b[1]);
    for b in TriangleInput::all() {
        let s = enumerate_support(d, b).unwrap();
        let t = enumerate_support(d, swapped(b)).unwrap();
        assert!(s.iter().all(|x| t.contains(&reflect(d, x))), "b={b}");
    }
}

#[test]
fn uniform_random_strings_succeed_at_the_support_density() {
    let d = 2;
    let rule: FloodRule = Arc::new(|_, _, r: &[bool]| Ok(vec![r[0] as u8]));
    let net = build_script_gd(d).unwrap();
    let trials = 4000;
    let rep = classical_success_rate(
        |b| {
            let inputs = qlocal::protocols::triangle_inputs(d, &[b]);
            Ok(flood_protocol(&net.topology, 0, 1, rule.clone()).with_inputs(inputs))
        },
        d,
        trials,
        5,
    )
    .unwrap();
    for b in TriangleInput::all() {
        let density = enumerate_support(d, b).unwrap().len() as f64 / 64.0;
        assert!((rep.per_input[b.index()] - density).abs() < 0.04, "b={b} {} vs {density}", rep.per_input[b.index()]);
    }
    assert!(classical_success_rate(|_| unreachable!(), d, 0, 0).is_err());
}

#[test]
fn support_cache_round_trip_and_repair() {
    let dir = tempfile::tempdir().unwrap();
    let cache = SupportCache::new(dir.path());
    let b = TriangleInput::from_index(5);
    let first = cache.get(2, b, 1e-9).unwrap();
    let path = cache.path(2, b, 1e-9);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(parse_support_file(&text, 2, b, 1e-9).unwrap(), *first);
    assert!(parse_support_file(&text, 2, TriangleInput::from_index(4), 1e-9).is_err());
    std::fs::write(&path, text.replacen("\n0", "\n1", 1)).unwrap();
    assert_eq!(*cache.get(2, b, 1e-9).unwrap(), *first);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

proptest! {
    #[test]
    fn parities_are_linear(d in prop::sample::select(vec![2usize, 4, 6]), a in any::<u64>(), c in any::<u64>()) {
        let mask = (1u64 << (3 * d)) - 1;
        let x = Bitstring::new(3 * d, a & mask).unwrap();
        let y = Bitstring::new(3 * d, c & mask).unwrap();
        let lhs = parities(d, &x.xor(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, parities(d, &x).unwrap().xor(parities(d, &y).unwrap()));
    }
}
