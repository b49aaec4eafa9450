//! Computational basis strings.
//!
//! Qubit 0 is the least significant bit of the packed value. The textual
//! form is ordinary binary notation, so qubit 0 is the *rightmost* character:
//! on 3 qubits the string with only qubit 0 set prints as `001`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest register a basis string can address.
pub const MAX_QUBITS: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisString {
    // `n` first would reorder by width; keep value-major ordering.
    value: u64,
    n: u32,
}

impl BasisString {
    pub fn new(value: u64, n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Capacity { n, max: MAX_QUBITS });
        }
        if value >> n != 0 {
            return Err(Error::invalid(
                "basis string",
                format!("value {value} does not fit in {n} qubits"),
            ));
        }
        Ok(BasisString {
            value,
            n: n as u32,
        })
    }

    /// Constructor for callers that already hold a value `< 2^n`.
    #[inline]
    pub(crate) fn from_raw(value: u64, n: usize) -> Self {
        debug_assert!(n <= MAX_QUBITS && value >> n == 0);
        BasisString {
            value,
            n: n as u32,
        }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bit(self, qubit: usize) -> bool {
        (self.value >> qubit) & 1 == 1
    }

    #[inline]
    pub fn flip(self, qubit: usize) -> Self {
        BasisString {
            value: self.value ^ (1 << qubit),
            n: self.n,
        }
    }

    /// Packs the bits on `support` into a local index, `support[0]` least
    /// significant.
    #[inline]
    pub fn gather(self, support: &[usize]) -> usize {
        support
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &q)| acc | ((((self.value >> q) & 1) as usize) << i))
    }

    /// Replaces the bits on `support` with those of the local index `local`.
    #[inline]
    pub fn scatter(self, support: &[usize], local: usize) -> Self {
        let mut v = self.value;
        for (i, &q) in support.iter().enumerate() {
            let b = ((local >> i) & 1) as u64;
            v = (v & !(1 << q)) | (b << q);
        }
        BasisString {
            value: v,
            n: self.n,
        }
    }

    /// True when `self` and `other` agree on every qubit outside `support`.
    pub fn agrees_outside(self, other: BasisString, support: &[usize]) -> bool {
        let mask = support.iter().fold(0u64, |m, &q| m | (1 << q));
        (self.value ^ other.value) & !mask == 0
    }

    /// All `2^n` strings in increasing order.
    pub fn all(n: usize) -> impl Iterator<Item = BasisString> {
        assert!(n <= MAX_QUBITS);
        (0..1u64 << n).map(move |v| BasisString::from_raw(v, n))
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            return f.write_str("ε");
        }
        for q in (0..self.n()).rev() {
            f.write_str(if self.bit(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}⟩")
    }
}

impl FromStr for BasisString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::invalid(
                "basis string",
                format!("length {n} outside 1..={MAX_QUBITS}"),
            ));
        }
        let mut value = 0u64;
        for (i, c) in s.chars().enumerate() {
            let b = match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::invalid(
                        format!("basis string[{i}]"),
                        format!("unexpected character {other:?}"),
                    ))
                }
            };
            value = (value << 1) | b;
        }
        BasisString::new(value, n)
    }
}

impl Serialize for BasisString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_msb_first() {
        let x = BasisString::new(1, 3).unwrap();
        assert_eq!(x.to_string(), "001");
        assert_eq!("001".parse::<BasisString>().unwrap(), x);
        assert_eq!("110".parse::<BasisString>().unwrap().value(), 6);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(BasisString::new(4, 2).is_err());
        assert!("012".parse::<BasisString>().is_err());
        assert!("".parse::<BasisString>().is_err());
    }

    #[test]
    fn gather_scatter() {
        // qubits 1 and 3 of 0b1010 are both set
        let x = BasisString::new(0b1010, 4).unwrap();
        assert_eq!(x.gather(&[1, 3]), 0b11);
        assert_eq!(x.gather(&[0, 1]), 0b10);
        let y = x.scatter(&[0, 3], 0b01);
        assert_eq!(y.value(), 0b0011);
        assert!(x.agrees_outside(y, &[0, 3]));
        assert!(!x.agrees_outside(y, &[0]));
    }
}
