use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::{Bitstring, Gate, GateKind, QubitId};
use crate::analytics::{DistributionKind, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::net::Topology;

/// Default qubit cap: 2^26 complex doubles is 1 GiB.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Probability threshold separating numerical zeros from support members.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense normalized state over `num_qubits` qubits, optionally labelled.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    labels: Vec<String>,
}

/// `|0…0⟩` on `n` qubits, capped at [`DEFAULT_MAX_QUBITS`].
pub fn new_state(n: usize) -> Result<StateVector> {
    StateVector::with_limit(n, DEFAULT_MAX_QUBITS)
}

/// Value-returning form of [`StateVector::apply`].
pub fn apply_gate(mut state: StateVector, g: &Gate) -> Result<StateVector> {
    state.apply(g)?;
    Ok(state)
}

/// Graph state of `g`: `H` on every qubit of `|0…0⟩`, then `CZ` once per
/// edge. Qubit `k` is the `k`-th node in ascending identifier order.
pub fn build_graph_state(g: &Topology) -> Result<StateVector> {
    let nodes = g.nodes();
    if nodes.is_empty() {
        return Err(Error::arg("graph state of an empty graph"));
    }
    let mut state = new_state(nodes.len())?;
    for k in 0..nodes.len() {
        state.apply(&Gate::H(QubitId::from(k)))?;
    }
    for (a, b) in g.edges() {
        let pa = g.position(a).expect("edge endpoint is a node");
        let pb = g.position(b).expect("edge endpoint is a node");
        state.apply(&Gate::Cz(QubitId::from(pa), QubitId::from(pb)))?;
    }
    state.labels = nodes.iter().map(|n| n.to_string()).collect();
    Ok(state)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

impl StateVector {
    pub fn with_limit(n: usize, max_qubits: usize) -> Result<Self> {
        if n > max_qubits {
            return Err(Error::Resource {
                what: "statevector qubits",
                limit: max_qubits,
                requested: n,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits: n, amps, labels: default_labels(n) })
    }

    /// Wraps raw amplitudes. The length must be a power of two and the
    /// vector normalized within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::arg(format!("amplitude count {} is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        if n > DEFAULT_MAX_QUBITS {
            return Err(Error::Resource {
                what: "statevector qubits",
                limit: DEFAULT_MAX_QUBITS,
                requested: n,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("state is not normalized (norm² = {norm})")));
        }
        Ok(StateVector { num_qubits: n, amps, labels: default_labels(n) })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_qubits {
            return Err(Error::arg(format!(
                "{} labels for {} qubits",
                labels.len(),
                self.num_qubits
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, basis: &Bitstring) -> Complex64 {
        self.amps[basis.value() as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        let targets = g.targets();
        for t in &targets {
            if t.index() >= self.num_qubits {
                return Err(Error::arg(format!("{g}: target {t} out of range for {} qubits", self.num_qubits)));
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::arg(format!("{g}: duplicate target")));
        }
        let pos: Vec<usize> = targets.iter().map(|t| t.index()).collect();
        apply_dense(&mut self.amps, g.kind(), &pos);
        Ok(())
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::arg(format!(
                "dimension mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Every basis string with non-zero probability, mapped to it.
    pub fn exact_distribution(&self) -> OutcomeDistribution {
        let entries = self
            .amps
            .iter()
            .enumerate()
            .filter_map(|(idx, a)| {
                let p = a.norm_sqr();
                (p > 0.0).then(|| (Bitstring::new(self.num_qubits, idx as u64).unwrap(), p))
            })
            .collect();
        OutcomeDistribution::from_entries(self.labels.clone(), DistributionKind::Exact, entries)
            .expect("basis strings match the schema width")
    }

    /// Basis strings with probability strictly above `tol`.
    pub fn support(&self, tol: f64) -> BTreeSet<Bitstring> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > tol)
            .map(|(idx, _)| Bitstring::new(self.num_qubits, idx as u64).unwrap())
            .collect()
    }

    /// Born-rule sample of every qubit in the computational basis.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> Bitstring {
        let idx = sample_index(self.amps.iter().map(|a| a.norm_sqr()), rng.gen::<f64>());
        Bitstring::new(self.num_qubits, idx as u64).unwrap()
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("q{k}")).collect()
}

/// Index selected by the cumulative walk at `u ∈ [0,1)`. Falls back to the
/// last index with non-zero weight when rounding leaves `u` past the end.
pub(crate) fn sample_index(weights: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, w) in weights.enumerate() {
        if w > 0.0 {
            last_nonzero = k;
        }
        acc += w;
        if u < acc {
            return k;
        }
    }
    last_nonzero
}

/// In-place gate kernel on a dense little-endian amplitude array.
/// `pos` are tensor positions in matrix order.
pub(crate) fn apply_dense(amps: &mut [Complex64], kind: GateKind, pos: &[usize]) {
    match kind {
        GateKind::H => {
            let m = 1usize << pos[0];
            let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * s;
                    amps[i | m] = (a - b) * s;
                }
            }
        }
        GateKind::S | GateKind::SPower(true) => {
            let m = 1usize << pos[0];
            for (i, a) in amps.iter_mut().enumerate() {
                if i & m != 0 {
                    *a *= I;
                }
            }
        }
        GateKind::SPower(false) => {}
        GateKind::Cnot => {
            let (c, t) = (1usize << pos[0], 1usize << pos[1]);
            for i in 0..amps.len() {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Cz | GateKind::Cs => {
            let mask = (1usize << pos[0]) | (1usize << pos[1]);
            let phase = if kind == GateKind::Cz { Complex64::new(-1.0, 0.0) } else { I };
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *a *= phase;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(k: usize) -> QubitId {
        QubitId::from(k)
    }

    #[test]
    fn new_state_is_all_zeros() {
        assert_eq!(new_state(1).unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(new_state(2).unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(new_state(27), Err(Error::Resource { limit: 26, .. })));
    }

    #[test]
    fn single_gate_examples() {
        let s = apply_gate(new_state(1).unwrap(), &Gate::H(q(0))).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);

        let one_one = StateVector::from_amplitudes(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let cz = apply_gate(one_one.clone(), &Gate::Cz(q(0), q(1))).unwrap();
        assert_eq!(cz.amplitudes()[3], c(-1.0, 0.0));
        let cs = apply_gate(one_one, &Gate::Cs(q(0), q(1))).unwrap();
        assert_eq!(cs.amplitudes()[3], c(0.0, 1.0));

        let plus = apply_gate(new_state(1).unwrap(), &Gate::H(q(0))).unwrap();
        assert_eq!(apply_gate(plus.clone(), &Gate::SPower(false, q(0))).unwrap(), plus);
    }

    #[test]
    fn bad_targets_are_rejected() {
        let mut s = new_state(2).unwrap();
        assert!(s.apply(&Gate::H(q(2))).is_err());
        assert!(s.apply(&Gate::Cz(q(1), q(1))).is_err());
    }

    #[test]
    fn graph_state_examples() {
        let single = build_graph_state(&Topology::new(vec![0], vec![]).unwrap()).unwrap();
        assert_abs_diff_eq!(single.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);

        let path = build_graph_state(&Topology::new(vec![0, 1], vec![(0, 1)]).unwrap()).unwrap();
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in path.amplitudes().iter().zip(expect) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }

        // Triangle: amplitude of z is (-1)^(#edges with both ends set) / √8.
        let tri = build_graph_state(&Topology::new(vec![0, 1, 2], vec![(0, 1), (1, 2), (0, 2)]).unwrap()).unwrap();
        for z in 0..8usize {
            let bit = |k: usize| (z >> k) & 1;
            let ones = bit(0) * bit(1) + bit(1) * bit(2) + bit(0) * bit(2);
            let sign = if ones % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(tri.amplitudes()[z].re, sign / 8f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn measurement_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = new_state(1).unwrap();
        assert_eq!(zero.measure_all(&mut rng).to_string(), "0");

        // |1⟩ on qubit 0, |0⟩ on qubit 1
        let ten = StateVector::from_amplitudes(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        for _ in 0..10 {
            assert_eq!(ten.measure_all(&mut rng).to_string(), "10");
        }
    }

    #[test]
    fn bell_state_frequencies() {
        let mut bell = new_state(2).unwrap();
        bell.apply(&Gate::H(q(0))).unwrap();
        bell.apply(&Gate::Cnot { control: q(0), target: q(1) }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shots = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..shots {
            counts[bell.measure_all(&mut rng).value() as usize] += 1;
        }
        assert_eq!(counts[1] + counts[2], 0);
        for k in [0, 3] {
            let f = counts[k] as f64 / shots as f64;
            assert!((f - 0.5).abs() <= 0.02, "frequency {f}");
        }
    }

    #[test]
    fn distribution_and_support_examples() {
        let plus = apply_gate(new_state(1).unwrap(), &Gate::H(q(0))).unwrap();
        let d = plus.exact_distribution();
        assert_abs_diff_eq!(d.prob(&"0".parse().unwrap()), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(&"1".parse().unwrap()), 0.5, epsilon = 1e-15);

        let zero = new_state(1).unwrap();
        assert_eq!(zero.exact_distribution().len(), 1);
        assert_eq!(zero.support(DEFAULT_SUPPORT_TOL).len(), 1);

        let mut bell = new_state(2).unwrap();
        bell.apply(&Gate::H(q(0))).unwrap();
        bell.apply(&Gate::Cnot { control: q(0), target: q(1) }).unwrap();
        let sup: Vec<String> = bell.support(DEFAULT_SUPPORT_TOL).iter().map(|b| b.to_string()).collect();
        assert_eq!(sup, vec!["00", "11"]);
    }

    #[test]
    fn two_path_distribution_matches_hand_computation() {
        // H⊗H on the path graph state: (1/2)(H⊗H)(1,1,1,-1) = (1/2)(1,1,1,-1),
        // so every outcome has probability 1/4.
        let mut s = build_graph_state(&Topology::new(vec![0, 1], vec![(0, 1)]).unwrap()).unwrap();
        s.apply(&Gate::H(q(0))).unwrap();
        s.apply(&Gate::H(q(1))).unwrap();
        let d = s.exact_distribution();
        assert_eq!(d.len(), 4);
        for (_, p) in d.iter() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn fidelity_examples() {
        let zero = new_state(1).unwrap();
        let one = apply_gate(apply_gate(zero.clone(), &Gate::H(q(0))).unwrap(), &Gate::S(q(0))).unwrap();
        let one = apply_gate(apply_gate(one, &Gate::S(q(0))).unwrap(), &Gate::H(q(0))).unwrap();
        let plus = apply_gate(zero.clone(), &Gate::H(q(0))).unwrap();
        assert_abs_diff_eq!(fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&zero, &plus).unwrap(), 0.5, epsilon = 1e-15);
        assert!(fidelity(&zero, &new_state(2).unwrap()).is_err());
    }
}
