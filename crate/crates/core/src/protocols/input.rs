use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Corner input bits `(b_0, b_1, b_2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TriangleInput {
    pub b: [bool; 3],
}

impl TriangleInput {
    pub fn new(b0: bool, b1: bool, b2: bool) -> Self {
        TriangleInput { b: [b0, b1, b2] }
    }

    /// The `k`-th triple in the order `000, 001, 010, ..., 111`, reading
    /// `b_0 b_1 b_2` as a binary number.
    pub fn from_index(k: usize) -> Self {
        Self::new(k & 4 != 0, k & 2 != 0, k & 1 != 0)
    }

    pub fn index(self) -> usize {
        (self.b[0] as usize) << 2 | (self.b[1] as usize) << 1 | self.b[2] as usize
    }

    pub fn all() -> impl Iterator<Item = TriangleInput> {
        (0..8).map(Self::from_index)
    }

    /// The four triples with a parity identity of their own, in the order
    /// `000, 011, 101, 110`.
    pub fn special() -> [TriangleInput; 4] {
        [0b000, 0b011, 0b101, 0b110].map(Self::from_index)
    }

    pub fn is_special(self) -> bool {
        !(self.b[0] ^ self.b[1] ^ self.b[2])
    }
}

impl fmt::Display for TriangleInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.b {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

impl FromStr for TriangleInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad input bit {c:?} in {s:?}"))),
            })
            .collect::<Result<_>>()?;
        match bits[..] {
            [b0, b1, b2] => Ok(Self::new(b0, b1, b2)),
            _ => Err(Error::Parse(format!("expected three bits, got {s:?}"))),
        }
    }
}
