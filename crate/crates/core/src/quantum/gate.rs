use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use super::QubitId;

/// The gate alphabet. `SPower(b)` is `S` when `b` is set and the identity
/// otherwise, so transcripts of conditional phase steps stay self-describing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    S,
    SPower(bool),
    Cnot,
    Cz,
    Cs,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::H,
        GateKind::S,
        GateKind::SPower(false),
        GateKind::SPower(true),
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Cs,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::S | GateKind::SPower(_) => 1,
            GateKind::Cnot | GateKind::Cz | GateKind::Cs => 2,
        }
    }

    /// Row-major unitary. For two-qubit kinds the basis index is `2a + b`
    /// where `a` is the first target (the control for CNOT).
    pub fn matrix(self) -> Vec<Complex64> {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            GateKind::H => vec![h, h, h, -h],
            GateKind::S | GateKind::SPower(true) => vec![one, z, z, i],
            GateKind::SPower(false) => vec![one, z, z, one],
            GateKind::Cnot => vec![
                one, z, z, z, //
                z, one, z, z, //
                z, z, z, one, //
                z, z, one, z,
            ],
            GateKind::Cz => diag4(-one),
            GateKind::Cs => diag4(i),
        }
    }
}

fn diag4(last: Complex64) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); 16];
    for k in 0..3 {
        m[5 * k] = Complex64::new(1.0, 0.0);
    }
    m[15] = last;
    m
}

/// A gate bound to its target qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(QubitId),
    S(QubitId),
    SPower(bool, QubitId),
    Cnot { control: QubitId, target: QubitId },
    Cz(QubitId, QubitId),
    Cs(QubitId, QubitId),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match *self {
            Gate::H(_) => GateKind::H,
            Gate::S(_) => GateKind::S,
            Gate::SPower(b, _) => GateKind::SPower(b),
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz(..) => GateKind::Cz,
            Gate::Cs(..) => GateKind::Cs,
        }
    }

    /// Targets in matrix order: the first one is the high bit of the
    /// two-qubit basis index.
    pub fn targets(&self) -> Vec<QubitId> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::SPower(_, q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz(a, b) | Gate::Cs(a, b) => vec![a, b],
        }
    }

    /// Same gate with its targets renamed.
    pub fn map_targets(&self, mut f: impl FnMut(QubitId) -> QubitId) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::S(q) => Gate::S(f(q)),
            Gate::SPower(b, q) => Gate::SPower(b, f(q)),
            Gate::Cnot { control, target } => Gate::Cnot { control: f(control), target: f(target) },
            Gate::Cz(a, b) => Gate::Cz(f(a), f(b)),
            Gate::Cs(a, b) => Gate::Cs(f(a), f(b)),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::SPower(b, q) => write!(f, "S^{} {q}", b as u8),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Cs(a, b) => write!(f, "CS {a} {b}"),
        }
    }
}
