use std::collections::BTreeMap;

use qlocal::analytics::{
    adversary_law, adversary_tv, empirical_distribution, exact_gamma, marginal, tv_distance, AdversarySpec,
    OutcomeDistribution,
};
use qlocal::net::Outputs;
use qlocal::protocols::{
    k_copies_protocol, relation_output, sample_record, sample_schema, sampling_protocol, AffineOptions, AffineStrategy,
    CopyStrategy, TriangleInput,
};
use qlocal::quantum::Bitstring;

#[test]
fn empirical_sampler_converges() {
    let d = 2;
    let gamma = exact_gamma(d).unwrap();
    let emp = empirical_distribution(&sampling_protocol(d).unwrap(), 100_000, 3, sample_schema(d), |o: &Outputs| {
        sample_record(d, o)
    })
    .unwrap();
    let tv = tv_distance(&gamma, &emp).unwrap();
    assert!(tv <= 0.02, "TV {tv}");
}

#[test]
fn gamma_text_round_trip() {
    let gamma = exact_gamma(2).unwrap();
    let back = OutcomeDistribution::from_text(&gamma.to_text()).unwrap();
    assert!(tv_distance(&gamma, &back).unwrap() < 1e-15);
    assert_eq!(back.schema(), gamma.schema());
}

#[test]
fn quantum_copies_are_independent() {
    let d = 2;
    let inputs = [TriangleInput::from_index(1), TriangleInput::from_index(3)];
    let law = k_copies_protocol(d, &inputs, CopyStrategy::Quantum).unwrap().exact_law().unwrap();
    let mut joint: BTreeMap<(Bitstring, Bitstring), f64> = BTreeMap::new();
    for (o, p) in &law {
        let key = (relation_output(d, o, 0).unwrap(), relation_output(d, o, 1).unwrap());
        *joint.entry(key).or_insert(0.0) += p;
    }
    let mut left: BTreeMap<Bitstring, f64> = BTreeMap::new();
    let mut right: BTreeMap<Bitstring, f64> = BTreeMap::new();
    for ((x, y), p) in &joint {
        *left.entry(*x).or_insert(0.0) += p;
        *right.entry(*y).or_insert(0.0) += p;
    }
    for (x, px) in &left {
        for (y, py) in &right {
            let pj = joint.get(&(*x, *y)).copied().unwrap_or(0.0);
            assert!((pj - px * py).abs() < 1e-12);
        }
    }
}

#[test]
fn adversary_with_quantum_like_marginals_still_pays() {
    let spec = AdversarySpec {
        strategy: AffineStrategy::default(),
        options: AffineOptions { sample_inputs: true, coset_fill: true, mix_sides: true, mix_even: true },
        bias: [0.5; 3],
    };
    let law = adversary_law(4, &spec).unwrap();
    let one = Bitstring::from_bits(&[true]).unwrap();
    for i in 0..3 {
        assert!((marginal(&law, i).unwrap().prob(&one) - 0.5).abs() < 1e-12);
    }
    assert!(adversary_tv(4, &spec).unwrap() >= 1.0 / 11.0);
}
