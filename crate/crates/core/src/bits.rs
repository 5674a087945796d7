//! Fixed-length bit strings, most significant bit first.
//!
//! Equal-length strings compare lexicographically, which coincides with the
//! order of the unsigned integers they spell.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        BitString(vec![true; len])
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString(
            (0..len)
                .rev()
                .map(|k| k < 64 && (value >> k) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_u64(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.0[i] = b;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    pub fn first(&self) -> Option<bool> {
        self.0.first().copied()
    }

    /// Bits `range` as a new string.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        BitString(self.0[range].to_vec())
    }

    /// Drops the first bit.
    pub fn tail(&self) -> Self {
        self.slice(1..self.len())
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    pub fn prepend(&self, b: bool) -> Self {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(b);
        v.extend_from_slice(&self.0);
        BitString(v)
    }

    /// Inserts `b` so that it ends up at position `i`.
    pub fn splice(&self, i: usize, b: bool) -> Self {
        let mut v = self.0.clone();
        v.insert(i, b);
        BitString(v)
    }

    pub fn remove(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(i);
        BitString(v)
    }

    pub fn complement(&self) -> Self {
        BitString(self.0.iter().map(|&b| !b).collect())
    }

    pub fn xor(&self, other: &BitString) -> Self {
        assert_eq!(self.len(), other.len(), "xor of unequal lengths");
        BitString(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    pub fn parity(&self) -> bool {
        self.0.iter().fold(false, |acc, &b| acc ^ b)
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// All strings of length `len` in increasing order. Only sensible for small `len`.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64);
        (0..1u64 << len).map(move |v| BitString::from_u64(v, len))
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        BitString(v)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}
