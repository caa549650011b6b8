use crate::protocols::{AffineStrategy, TriangleInput};

/// Which of the four parity equalities a strategy satisfies, in the order
/// of inputs `000, 011, 101, 110`.
pub fn lemma2_equalities(s: &AffineStrategy) -> [bool; 4] {
    let (f, t) = (false, true);
    [
        !s.q_e(TriangleInput::new(f, f, f)),
        s.q_e(TriangleInput::new(f, t, t)) ^ s.q_r(f, t) ^ s.q_l(f, t),
        s.q_e(TriangleInput::new(t, f, t)) ^ s.q_r(t, f) ^ s.q_b(f, t),
        s.q_e(TriangleInput::new(t, t, f)) ^ s.q_b(t, f) ^ s.q_l(t, f),
    ]
}

/// Counts from the exhaustive scan of affine parity functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Report {
    pub q_e_functions: usize,
    pub triples_scanned: usize,
    pub admissible_triples: usize,
    pub combinations: usize,
    /// Admissible combinations satisfying all four equalities.
    pub all_four_satisfied: usize,
    pub max_satisfied: usize,
    /// `histogram[k]` = combinations satisfying exactly `k` equalities.
    pub histogram: [usize; 5],
}

impl Lemma2Report {
    pub fn confirmed(&self) -> bool {
        self.all_four_satisfied == 0
    }
}

/// Scans every affine `q_E` and every `(q_R, q_B, q_L)` triple, keeps the
/// triples with `q_R ⊕ q_B ⊕ q_L = 0` everywhere, and counts how many of
/// the four equalities each combination satisfies.
pub fn lemma2_exhaustive() -> Lemma2Report {
    let mut admissible_triples = 0;
    let mut histogram = [0usize; 5];
    for triple in 0u16..512 {
        let base = AffineStrategy::from_code(triple << 4);
        if !base.is_admissible() {
            continue;
        }
        admissible_triples += 1;
        for e in 0u16..16 {
            let s = AffineStrategy::from_code(triple << 4 | e);
            histogram[lemma2_equalities(&s).iter().filter(|&&x| x).count()] += 1;
        }
    }
    Lemma2Report {
        q_e_functions: 16,
        triples_scanned: 512,
        admissible_triples,
        combinations: histogram.iter().sum(),
        all_four_satisfied: histogram[4],
        max_satisfied: (0..5).rev().find(|&k| histogram[k] > 0).unwrap_or(0),
        histogram,
    }
}
