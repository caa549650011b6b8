use std::fmt;

use crate::error::{Error, Result};
use crate::protocols::TriangleInput;
use crate::quantum::Bitstring;

/// `(m_E, m_R, m_B, m_L)` of a ring outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityTuple {
    pub m_e: bool,
    pub m_r: bool,
    pub m_b: bool,
    pub m_l: bool,
}

impl ParityTuple {
    pub fn new(m_e: bool, m_r: bool, m_b: bool, m_l: bool) -> Self {
        ParityTuple { m_e, m_r, m_b, m_l }
    }

    /// Bits `m_E, m_R, m_B, m_L` as bits 3, 2, 1, 0 of the index.
    pub fn index(self) -> usize {
        (self.m_e as usize) << 3 | (self.m_r as usize) << 2 | (self.m_b as usize) << 1 | self.m_l as usize
    }

    pub fn from_index(k: usize) -> Self {
        ParityTuple::new(k & 8 != 0, k & 4 != 0, k & 2 != 0, k & 1 != 0)
    }

    pub fn xor(self, o: ParityTuple) -> Self {
        ParityTuple::new(self.m_e ^ o.m_e, self.m_r ^ o.m_r, self.m_b ^ o.m_b, self.m_l ^ o.m_l)
    }
}

impl fmt::Display for ParityTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.m_e as u8, self.m_r as u8, self.m_b as u8, self.m_l as u8)
    }
}

/// Bit masks over ring positions selecting `V_even`, `V_R ∩ V_odd`,
/// `V_B ∩ V_odd` and `V_L ∩ V_odd`.
pub fn parity_masks(d: usize) -> Result<[u64; 4]> {
    if d < 2 || d % 2 != 0 || 3 * d > 64 {
        return Err(Error::arg(format!("d must be even, at least 2 and at most 21, got {d}")));
    }
    let odd_in = |lo: usize, hi: usize| (lo..hi).filter(|i| i % 2 == 1).fold(0u64, |m, i| m | 1 << i);
    let even = (0..3 * d).step_by(2).fold(0u64, |m, i| m | 1 << i);
    Ok([even, odd_in(1, d), odd_in(d + 1, 2 * d), odd_in(2 * d + 1, 3 * d)])
}

pub fn parities(d: usize, outcome: &Bitstring) -> Result<ParityTuple> {
    let masks = parity_masks(d)?;
    if outcome.len() != 3 * d {
        return Err(Error::arg(format!("outcome has {} bits, expected {}", outcome.len(), 3 * d)));
    }
    let p = |m: u64| (outcome.value() & m).count_ones() % 2 == 1;
    Ok(ParityTuple::new(p(masks[0]), p(masks[1]), p(masks[2]), p(masks[3])))
}

/// Parity conditions on outcomes of the triangle process: always
/// `m_R ⊕ m_B ⊕ m_L = 0`, plus one identity for each of the inputs
/// `000, 011, 101, 110`. The other four inputs get no extra condition.
pub fn check_prop1(b: TriangleInput, p: ParityTuple) -> bool {
    if p.m_r ^ p.m_b ^ p.m_l {
        return false;
    }
    match b.b {
        [false, false, false] => !p.m_e,
        [false, true, true] => p.m_e ^ p.m_r ^ p.m_l,
        [true, false, true] => p.m_e ^ p.m_r ^ p.m_b,
        [true, true, false] => p.m_e ^ p.m_b ^ p.m_l,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(d: usize, i: usize) -> Bitstring {
        Bitstring::new(3 * d, 1 << i).unwrap()
    }

    #[test]
    fn single_bit_examples() {
        assert_eq!(parities(4, &Bitstring::zeros(12)).unwrap(), ParityTuple::default());
        assert_eq!(parities(4, &single(4, 1)).unwrap(), ParityTuple::new(false, true, false, false));
        assert_eq!(parities(4, &single(4, 0)).unwrap(), ParityTuple::new(true, false, false, false));
        assert_eq!(parities(4, &single(4, 5)).unwrap(), ParityTuple::new(false, false, true, false));
        assert_eq!(parities(4, &single(4, 11)).unwrap(), ParityTuple::new(false, false, false, true));
        assert!(parities(4, &Bitstring::zeros(11)).is_err());
        assert!(parities(3, &Bitstring::zeros(9)).is_err());
    }

    #[test]
    fn prop1_examples() {
        let b = |k| TriangleInput::from_index(k);
        let p = |k| ParityTuple::from_index(k);
        assert!(check_prop1(b(0b000), p(0b0000)));
        assert!(!check_prop1(b(0b000), p(0b1000)));
        assert!(check_prop1(b(0b011), p(0b1000)));
        for k in 0..8 {
            assert!(!check_prop1(b(k), ParityTuple::new(false, true, false, false)));
            assert!(!check_prop1(b(k), ParityTuple::new(true, true, false, false)));
        }
    }

    #[test]
    fn index_round_trip() {
        for k in 0..16 {
            assert_eq!(ParityTuple::from_index(k).index(), k);
        }
    }

    proptest! {
        #[test]
        fn parities_are_linear(d in prop::sample::select(vec![2usize, 4, 6, 8]), s: u64, t: u64) {
            let mask = (1u64 << (3 * d)) - 1;
            let a = Bitstring::new(3 * d, s & mask).unwrap();
            let b = Bitstring::new(3 * d, t & mask).unwrap();
            let lhs = parities(d, &a.xor(&b).unwrap()).unwrap();
            let rhs = parities(d, &a).unwrap().xor(parities(d, &b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
