use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Fixed-length bit string of at most 64 bits.
///
/// Position `k` refers to the `k`-th entry of whatever order the producer
/// documents (qubit order for states, schema order for distributions).
/// Displayed with position 0 first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    len: u8,
    bits: u64,
}

impl Bitstring {
    pub const MAX_LEN: usize = 64;

    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > Self::MAX_LEN {
            return Err(Error::Resource {
                what: "bitstring length",
                limit: Self::MAX_LEN,
                requested: len,
            });
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::arg(format!("value {bits:#x} does not fit in {len} bits")));
        }
        Ok(Bitstring { len: len as u8, bits })
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len <= Self::MAX_LEN);
        Bitstring { len: len as u8, bits: 0 }
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut packed = 0u64;
        for (k, &b) in bits.iter().enumerate() {
            if k >= Self::MAX_LEN {
                return Err(Error::Resource {
                    what: "bitstring length",
                    limit: Self::MAX_LEN,
                    requested: bits.len(),
                });
            }
            packed |= (b as u64) << k;
        }
        Ok(Bitstring { len: bits.len() as u8, bits: packed })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed value: bit `k` of the result is position `k`.
    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, k: usize) -> bool {
        assert!(k < self.len(), "bit {k} out of range for length {}", self.len);
        (self.bits >> k) & 1 == 1
    }

    pub fn with_bit(mut self, k: usize, b: bool) -> Self {
        assert!(k < self.len());
        self.bits = (self.bits & !(1 << k)) | ((b as u64) << k);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |k| self.bit(k))
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Bitstring) -> Result<Self> {
        let len = self.len() + other.len();
        if len > Self::MAX_LEN {
            return Err(Error::Resource {
                what: "bitstring length",
                limit: Self::MAX_LEN,
                requested: len,
            });
        }
        let shifted = if other.len == 0 { 0 } else { other.bits << self.len };
        Ok(Bitstring { len: len as u8, bits: self.bits | shifted })
    }

    /// Projection onto the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        let mut out = 0u64;
        for (j, &p) in positions.iter().enumerate() {
            if p >= self.len() {
                return Err(Error::arg(format!("position {p} outside bitstring of length {}", self.len)));
            }
            out |= ((self.bits >> p) & 1) << j;
        }
        Bitstring::new(positions.len(), out)
    }

    pub fn xor(&self, other: &Bitstring) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::arg("xor of bitstrings with different lengths"));
        }
        Ok(Bitstring { len: self.len, bits: self.bits ^ other.bits })
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bitstring"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Bitstring::from_bits(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_puts_position_zero_first() {
        let b = Bitstring::from_bits(&[true, false, false]).unwrap();
        assert_eq!(b.value(), 1);
        assert_eq!(b.to_string(), "100");
        assert_eq!("100".parse::<Bitstring>().unwrap(), b);
    }

    #[test]
    fn concat_and_select() {
        let a: Bitstring = "10".parse().unwrap();
        let b: Bitstring = "011".parse().unwrap();
        let c = a.concat(&b).unwrap();
        assert_eq!(c.to_string(), "10011");
        assert_eq!(c.select(&[4, 0]).unwrap().to_string(), "11");
        assert!(c.select(&[5]).is_err());
    }

    #[test]
    fn rejects_overflowing_values() {
        assert!(Bitstring::new(2, 4).is_err());
        assert!(Bitstring::new(65, 0).is_err());
        assert!(Bitstring::new(64, u64::MAX).is_ok());
    }
}
