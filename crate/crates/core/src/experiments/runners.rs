use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Experiment, ExperimentConfig, Report, Table, EXHAUSTIVE_SUBGRAPH_NODES};
use crate::analytics::{
    empirical_distribution, exact_classical_distribution, exact_gamma, marginal, min_tv_affine_adversary, tv_distance,
    DistributionKind,
};
use crate::error::Result;
use crate::net::{build_script_gd, shot_seed, NodeId, Outputs, Topology};
use crate::protocols::{
    affine_protocol, check_subgraph_state, derandomize_function_protocol, k_copies_protocol,
    noisy_function_protocol, relation_output, relation_protocol, sample_record, sample_schema, sampling_protocol,
    subgraph_protocol, xor_of_inputs, CopyStrategy, OutputOracle, ProtocolOracle, TriangleInput, SUBGRAPH_ROUNDS,
};
use crate::quantum::Bitstring;
use crate::verify::{
    best_affine_success, check_prop1, enumerate_support, is_valid, lemma2_exhaustive, parities, SupportCache,
};

const FIDELITY_TOL: f64 = 1e-9;
const GAMMA_TOL: f64 = 1e-9;
const MARGINAL_TOL: f64 = 1e-12;
const TV_BOUND: f64 = 1.0 / 11.0;

pub(super) fn run(config: &ExperimentConfig) -> Result<Report> {
    match config.experiment {
        Experiment::RelationValidity => relation_validity(config),
        Experiment::Lemma2 => lemma2(),
        Experiment::AffineBound => affine_bound(config),
        Experiment::SubgraphFidelity => subgraph_fidelity(config),
        Experiment::GammaExact => gamma_exact(config),
        Experiment::TvAdversary => tv_adversary(config),
        Experiment::KCopies => k_copies(config),
        Experiment::DerandomizeDemo => derandomize_demo(config),
    }
}

fn relation_validity(c: &ExperimentConfig) -> Result<Report> {
    let d = c.d;
    let mut r = Report::new(c.experiment.name());
    r.summary = Table::new(&["input", "shots", "valid", "prop1_ok", "support_size"]);
    r.records = Table::new(&["input", "shot", "outcome", "in_support", "prop1_ok"]);
    let cache = c.support_cache.as_ref().map(SupportCache::new);
    let (mut total, mut valid) = (0usize, 0usize);
    for b in TriangleInput::all() {
        let support = match &cache {
            Some(cache) => cache.get(d, b, crate::quantum::DEFAULT_SUPPORT_TOL)?,
            None => enumerate_support(d, b)?,
        };
        let protocol = relation_protocol(d, b)?;
        let (mut ok, mut prop_ok) = (0usize, 0usize);
        for (s, outputs) in protocol.sample(c.shots, shot_seed(c.seed, b.index() as u64))?.iter().enumerate() {
            let x = relation_output(d, outputs, 0)?;
            let in_support = support.contains(&x);
            let p1 = check_prop1(b, parities(d, &x)?);
            ok += in_support as usize;
            prop_ok += p1 as usize;
            r.records.push(vec![b.to_string(), s.to_string(), x.to_string(), in_support.to_string(), p1.to_string()]);
        }
        r.summary.push(vec![
            b.to_string(),
            c.shots.to_string(),
            ok.to_string(),
            prop_ok.to_string(),
            support.len().to_string(),
        ]);
        total += c.shots;
        valid += ok;
    }
    r.param("d", d);
    r.param("shots_per_input", c.shots);
    r.param("seed", c.seed);
    r.param("valid", format!("{valid}/{total}"));
    r.check("all outputs in support", valid == total, format!("{valid}/{total} valid"));
    if c.trace {
        let exec = relation_protocol(d, TriangleInput::from_index(0))?.run(c.seed)?;
        r.artifacts.push(("trace.jsonl".into(), exec.trace.to_jsonl()));
    }
    Ok(r)
}

fn lemma2() -> Result<Report> {
    let rep = lemma2_exhaustive();
    let mut r = Report::new("lemma2");
    r.summary = Table::new(&[
        "q_e_functions",
        "triples_scanned",
        "admissible_triples",
        "combinations",
        "all_four_satisfied",
        "max_satisfied",
    ]);
    r.summary.push(
        [
            rep.q_e_functions,
            rep.triples_scanned,
            rep.admissible_triples,
            rep.combinations,
            rep.all_four_satisfied,
            rep.max_satisfied,
        ]
        .iter()
        .map(ToString::to_string)
        .collect(),
    );
    r.records = Table::new(&["equalities_satisfied", "combinations"]);
    for (k, n) in rep.histogram.iter().enumerate() {
        r.records.push(vec![k.to_string(), n.to_string()]);
    }
    r.param("combinations", rep.combinations);
    r.param("all_four_satisfied", rep.all_four_satisfied);
    r.param("max_satisfied", rep.max_satisfied);
    r.check("no combination satisfies all four", rep.confirmed(), format!("{} of {}", rep.all_four_satisfied, rep.combinations));
    r.check("at most three hold together", rep.max_satisfied == 3, format!("max {}", rep.max_satisfied));
    Ok(r)
}

fn affine_bound(c: &ExperimentConfig) -> Result<Report> {
    let (d, t) = (c.d, c.effective_rounds());
    let best = best_affine_success(d)?;
    let w = best.witness;
    let mut r = Report::new(c.experiment.name());
    r.summary = Table::new(&["d", "T", "admissible_scanned", "best_successes", "probability", "witness", "witness_code"]);
    r.summary.push(vec![
        d.to_string(),
        t.to_string(),
        best.admissible_scanned.to_string(),
        best.successes.to_string(),
        best.probability.to_string(),
        w.to_string(),
        w.code().to_string(),
    ]);
    r.records = Table::new(&["input", "parities", "predicted_valid", "replay_outcome", "replay_valid", "deterministic"]);
    let mut replay_ok = 0;
    let mut all_match = true;
    let mut all_deterministic = true;
    for b in TriangleInput::all() {
        let predicted = check_prop1(b, w.parities(b));
        let law = affine_protocol(d, w, t, b)?.exact_law()?;
        let deterministic = law.len() == 1;
        let (outputs, _) = law.iter().next().expect("a law has at least one outcome");
        let x = relation_output(d, outputs, 0)?;
        let valid = is_valid(d, b, &x)?.in_support;
        replay_ok += valid as usize;
        all_match &= valid == predicted;
        all_deterministic &= deterministic;
        r.records.push(vec![
            b.to_string(),
            w.parities(b).to_string(),
            predicted.to_string(),
            x.to_string(),
            valid.to_string(),
            deterministic.to_string(),
        ]);
    }
    r.param("d", d);
    r.param("T", t);
    r.param("best_probability", best.probability);
    r.param("witness", w);
    r.param("replay_successes", replay_ok);
    r.check("best success is 7/8", best.successes == 7, format!("{}/8", best.successes));
    r.check("replay matches prediction", all_match && replay_ok == best.successes, format!("{replay_ok}/8 valid on replay"));
    r.check("replay is deterministic", all_deterministic, "single outcome per input");
    if c.trace {
        let exec = affine_protocol(d, w, t, TriangleInput::from_index(0))?.run(c.seed)?;
        r.artifacts.push(("trace.jsonl".into(), exec.trace.to_jsonl()));
    }
    Ok(r)
}

fn assignment_string(topology: &Topology, on: &BTreeMap<NodeId, bool>) -> String {
    topology.nodes().iter().map(|u| if on[u] { '1' } else { '0' }).collect()
}

fn subgraph_fidelity(c: &ExperimentConfig) -> Result<Report> {
    let topology = match &c.topology {
        Some(t) => t.clone(),
        None => build_script_gd(c.d)?.topology,
    };
    let n = topology.num_nodes();
    let assignments: Vec<BTreeMap<NodeId, bool>> = if n <= EXHAUSTIVE_SUBGRAPH_NODES {
        (0u64..1 << n)
            .map(|m| topology.nodes().iter().enumerate().map(|(i, &u)| (u, (m >> i) & 1 == 1)).collect())
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        (0..c.shots).map(|_| topology.nodes().iter().map(|&u| (u, rng.gen())).collect()).collect()
    };
    let mut r = Report::new(c.experiment.name());
    r.records = Table::new(&["assignment", "fidelity", "rounds", "max_registers_per_message"]);
    let mut min_fid = f64::INFINITY;
    let (mut rounds_ok, mut regs_ok) = (true, true);
    for on in &assignments {
        let chk = check_subgraph_state(&topology, on)?;
        min_fid = min_fid.min(chk.fidelity);
        rounds_ok &= chk.rounds == SUBGRAPH_ROUNDS;
        regs_ok &= chk.max_registers_per_message <= 1;
        r.records.push(vec![
            assignment_string(&topology, on),
            format!("{:.12}", chk.fidelity),
            chk.rounds.to_string(),
            chk.max_registers_per_message.to_string(),
        ]);
    }
    r.summary = Table::new(&["nodes", "edges", "assignments", "exhaustive", "min_fidelity"]);
    r.summary.push(vec![
        n.to_string(),
        topology.num_edges().to_string(),
        assignments.len().to_string(),
        (n <= EXHAUSTIVE_SUBGRAPH_NODES).to_string(),
        format!("{min_fid:.12}"),
    ]);
    r.param("nodes", n);
    r.param("assignments", assignments.len());
    r.param("min_fidelity", format!("{min_fid:.12}"));
    r.check("fidelity with reference", min_fid >= 1.0 - FIDELITY_TOL, format!("min {min_fid:.12}"));
    r.check("two exchange rounds", rounds_ok, format!("expected {SUBGRAPH_ROUNDS}"));
    r.check("one register per message", regs_ok, "per edge direction per round");
    if c.trace {
        let all_on: BTreeMap<NodeId, bool> = topology.nodes().iter().map(|&u| (u, true)).collect();
        let exec = subgraph_protocol(&topology, &all_on).run(c.seed)?;
        r.artifacts.push(("trace.jsonl".into(), exec.trace.to_jsonl()));
    }
    Ok(r)
}

fn gamma_exact(c: &ExperimentConfig) -> Result<Report> {
    let d = c.d;
    let gamma = exact_gamma(d)?;
    let protocol = sampling_protocol(d)?;
    let record = |o: &Outputs| sample_record(d, o);
    let distributed = exact_classical_distribution(&protocol, sample_schema(d), record)?;
    let tv = tv_distance(&gamma, &distributed)?;
    let mut r = Report::new(c.experiment.name());
    r.records = Table::new(&["label", "p_one_exact", "p_one_distributed"]);
    let mut marginals_ok = true;
    for i in 0..3 {
        let one = Bitstring::from_bits(&[true])?;
        let pg = marginal(&gamma, i)?.prob(&one);
        let pd = marginal(&distributed, i)?.prob(&one);
        marginals_ok &= (pg - 0.5).abs() <= MARGINAL_TOL && (pd - 0.5).abs() <= MARGINAL_TOL;
        r.records.push(vec![format!("b{i}"), pg.to_string(), pd.to_string()]);
    }
    let empirical_tv = if c.shots > 0 {
        let emp = empirical_distribution(&protocol, c.shots, c.seed, sample_schema(d), record)?;
        Some(tv_distance(&gamma, &emp)?)
    } else {
        None
    };
    let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6e}"));
    let compare_tv = match &c.compare {
        Some(other) => {
            let tv = tv_distance(&gamma, other)?;
            if other.kind() == DistributionKind::Exact {
                r.check("imported law matches", tv <= GAMMA_TOL, format!("TV {tv:.3e}"));
            }
            Some(tv)
        }
        None => None,
    };
    r.summary = Table::new(&["d", "support_size", "tv_cross_oracle", "empirical_shots", "tv_empirical", "tv_imported"]);
    r.summary.push(vec![
        d.to_string(),
        gamma.len().to_string(),
        format!("{tv:.6e}"),
        c.shots.to_string(),
        fmt_opt(empirical_tv),
        fmt_opt(compare_tv),
    ]);
    r.param("d", d);
    r.param("support_size", gamma.len());
    r.param("tv_cross_oracle", format!("{tv:.6e}"));
    r.param("tv_empirical", fmt_opt(empirical_tv));
    r.check("cross-oracle TV", tv <= GAMMA_TOL, format!("TV {tv:.3e}"));
    r.check("input marginals are 1/2", marginals_ok, "b0, b1, b2");
    r.artifacts.push((format!("gamma-d{d}.txt"), gamma.to_text()));
    Ok(r)
}

fn tv_adversary(c: &ExperimentConfig) -> Result<Report> {
    let (d, t) = (c.d, c.effective_rounds());
    let res = min_tv_affine_adversary(d, t)?;
    let w = &res.witness;
    let floor = (5.0f64 / 11.0).powi(3);
    let mut r = Report::new(c.experiment.name());
    r.summary = Table::new(&["d", "T", "family_size", "min_tv", "bound", "witness_invalid_mass"]);
    r.summary.push(vec![
        d.to_string(),
        t.to_string(),
        res.family_size.to_string(),
        format!("{:.12}", res.tv),
        format!("{TV_BOUND:.12}"),
        format!("{:.12}", res.witness_invalid_mass),
    ]);
    r.records = Table::new(&["strategy", "sample_inputs", "coset_fill", "mix_sides", "mix_even", "bias", "validity"]);
    r.records.push(vec![
        w.strategy.to_string(),
        w.options.sample_inputs.to_string(),
        w.options.coset_fill.to_string(),
        w.options.mix_sides.to_string(),
        w.options.mix_even.to_string(),
        w.bias.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join(";"),
        format!("{:.12}", res.witness_validity),
    ]);
    r.param("d", d);
    r.param("T", t);
    r.param("family_size", res.family_size);
    r.param("min_tv", format!("{:.12}", res.tv));
    r.check("min TV at least 1/11", res.tv >= TV_BOUND, format!("{:.6} vs {:.6}", res.tv, TV_BOUND));
    r.check(
        "witness invalid mass at least (5/11)^3",
        res.witness_invalid_mass >= floor - 1e-12,
        format!("{:.6} vs {floor:.6}", res.witness_invalid_mass),
    );
    Ok(r)
}

fn k_copies(c: &ExperimentConfig) -> Result<Report> {
    let (d, k, t) = (c.d, c.k, c.effective_rounds());
    let best = best_affine_success(d)?;
    let w = best.witness;
    let mut r = Report::new(c.experiment.name());
    r.records = Table::new(&["side", "inputs", "copies_valid", "all_valid"]);
    let total = 8usize.pow(k as u32);
    let mut wins = 0usize;
    for idx in 0..total {
        let inputs: Vec<TriangleInput> = (0..k).map(|j| TriangleInput::from_index((idx >> (3 * j)) & 7)).collect();
        let outputs = k_copies_protocol(d, &inputs, CopyStrategy::Affine(w, t))?.run(c.seed)?.outputs;
        let valid = copies_valid(d, &inputs, &outputs)?;
        let all = valid.iter().all(|&v| v);
        wins += all as usize;
        r.records.push(vec!["classical".into(), join_inputs(&inputs), bits_string(&valid), all.to_string()]);
    }
    let predicted = best.successes.pow(k as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut quantum_ok = 0usize;
    for s in 0..c.shots {
        let inputs: Vec<TriangleInput> = (0..k).map(|_| TriangleInput::from_index(rng.gen_range(0..8))).collect();
        let outputs = k_copies_protocol(d, &inputs, CopyStrategy::Quantum)?.run(shot_seed(c.seed, s as u64))?.outputs;
        let valid = copies_valid(d, &inputs, &outputs)?;
        let all = valid.iter().all(|&v| v);
        quantum_ok += all as usize;
        r.records.push(vec!["quantum".into(), join_inputs(&inputs), bits_string(&valid), all.to_string()]);
    }
    let rate = wins as f64 / total as f64;
    let expected = (best.successes as f64 / 8.0).powi(k as i32);
    r.summary = Table::new(&["d", "k", "T", "witness", "classical_successes", "inputs", "classical_rate", "predicted_rate", "quantum_valid", "quantum_runs"]);
    r.summary.push(vec![
        d.to_string(),
        k.to_string(),
        t.to_string(),
        w.to_string(),
        wins.to_string(),
        total.to_string(),
        format!("{rate:.12}"),
        format!("{expected:.12}"),
        quantum_ok.to_string(),
        c.shots.to_string(),
    ]);
    r.param("d", d);
    r.param("k", k);
    r.param("T", t);
    r.param("classical_rate", format!("{rate:.12}"));
    r.param("predicted_rate", format!("{expected:.12}"));
    r.param("quantum_valid", format!("{quantum_ok}/{}", c.shots));
    r.check("classical rate is (7/8)^k", wins == predicted && best.successes == 7, format!("{wins}/{total}, predicted {predicted}/{total}"));
    r.check("quantum copies all valid", quantum_ok == c.shots, format!("{quantum_ok}/{}", c.shots));
    Ok(r)
}

fn copies_valid(d: usize, inputs: &[TriangleInput], outputs: &Outputs) -> Result<Vec<bool>> {
    inputs
        .iter()
        .enumerate()
        .map(|(j, &b)| Ok(is_valid(d, b, &relation_output(d, outputs, j)?)?.in_support))
        .collect()
}

fn join_inputs(inputs: &[TriangleInput]) -> String {
    inputs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn derandomize_demo(c: &ExperimentConfig) -> Result<Report> {
    let t = c.effective_rounds();
    let topology = match &c.topology {
        Some(t) => t.clone(),
        None => Topology::new(0..4, [(0, 1), (1, 2), (2, 3), (3, 0)])?,
    };
    let nodes = topology.nodes().to_vec();
    let reference_topology = topology.clone();
    let oracle = ProtocolOracle::new(nodes.clone(), vec![0], move |inputs| {
        Ok(noisy_function_protocol(&reference_topology, t, xor_of_inputs).with_inputs(inputs.clone()))
    });
    let oracle: Arc<dyn OutputOracle> = Arc::new(oracle);
    let protocol = derandomize_function_protocol(&topology, oracle, t);
    let mut r = Report::new(c.experiment.name());
    r.records = Table::new(&["input", "expected", "outputs", "correct"]);
    let total = 1usize << nodes.len();
    let mut correct = 0usize;
    for x in 0..total {
        let inputs: BTreeMap<NodeId, Vec<u8>> =
            nodes.iter().enumerate().map(|(i, &u)| (u, vec![((x >> i) & 1) as u8])).collect();
        let expected = inputs.values().fold(0u8, |a, v| a ^ v[0]);
        let exec = protocol.clone().with_inputs(inputs.clone()).run(c.seed)?;
        let outs: String = nodes.iter().map(|u| exec.outputs[u].first().map_or('?', |&b| (b'0' + b) as char)).collect();
        let ok = nodes.iter().all(|u| exec.outputs[u] == vec![expected]);
        correct += ok as usize;
        let input_bits: String = nodes.iter().map(|u| (b'0' + inputs[u][0]) as char).collect();
        r.records.push(vec![input_bits, expected.to_string(), outs, ok.to_string()]);
        if c.trace && x == total - 1 {
            r.artifacts.push(("trace.jsonl".into(), exec.trace.to_jsonl()));
        }
    }
    r.summary = Table::new(&["nodes", "edges", "T", "inputs", "correct"]);
    r.summary.push(vec![
        nodes.len().to_string(),
        topology.num_edges().to_string(),
        t.to_string(),
        total.to_string(),
        correct.to_string(),
    ]);
    r.param("nodes", nodes.len());
    r.param("T", t);
    r.param("correct", format!("{correct}/{total}"));
    r.check("derandomized protocol computes XOR", correct == total, format!("{correct}/{total} inputs"));
    Ok(r)
}
