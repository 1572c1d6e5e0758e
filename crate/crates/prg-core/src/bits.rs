//! Packed bit strings and index sets.
//!
//! Both types store their payload in `u64` words, least-significant bit
//! first, with all bits above the declared length kept at zero.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("length mismatch: left has {left} bits, right has {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid character {found:?} at position {pos}")]
    InvalidChar { found: char, pos: usize },
    #[error("invalid hex digit {found:?}")]
    InvalidHex { found: char },
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

fn tail_mask(n: usize) -> u64 {
    if n % 64 == 0 {
        u64::MAX
    } else {
        (1u64 << (n % 64)) - 1
    }
}

/// A fixed-length string over `{0,1}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    n: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString { n, words: vec![0; words_for(n)] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n {
            if f(i) {
                s.set(i, true);
            }
        }
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Interprets the low `n` bits of `value`, index 0 = least significant.
    pub fn from_u64(n: usize, value: u64) -> Self {
        assert!(n <= 64);
        let mut s = Self::zeros(n);
        if n > 0 {
            s.words[0] = value & tail_mask(n);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        let (w, b) = (i / 64, i % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.n, other.n, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitString) {
        assert_eq!(self.n, other.n, "and of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// The contiguous bit slice `[start, start + len)` as a new string.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.n, "slice out of range");
        BitString::from_fn(len, |i| self.get(start + i))
    }

    /// Parses a string of `0`/`1` characters, index 0 = leftmost character.
    pub fn parse_binary(s: &str) -> Result<Self, BitsError> {
        let mut out = Self::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(i, true),
                _ => return Err(BitsError::InvalidChar { found: c, pos: i }),
            }
        }
        Ok(out)
    }

    /// Parses hex, most significant bit of each byte first, truncated to `n` bits.
    ///
    /// The hex string must supply at least `n` bits.
    pub fn parse_hex(s: &str, n: usize) -> Result<Self, BitsError> {
        let digits: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_digit(16).map(|d| d as u8).ok_or(BitsError::InvalidHex { found: c }))
            .collect::<Result<_, _>>()?;
        if digits.len() * 4 < n {
            return Err(BitsError::LengthMismatch { left: digits.len() * 4, right: n });
        }
        Ok(Self::from_fn(n, |i| {
            let d = digits[i / 4];
            (d >> (3 - (i % 4))) & 1 == 1
        }))
    }

    /// Hex form of the string, bit 0 first as the most significant bit of the
    /// first digit; the final digit is zero-padded.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.n.div_ceil(4));
        for d in 0..self.n.div_ceil(4) {
            let mut v = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.n && self.get(i) {
                    v |= 1 << (3 - b);
                }
            }
            out.push(char::from_digit(v as u32, 16).unwrap());
        }
        out
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// A subset of `[n]`, stored as a bit mask.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSet {
    n: usize,
    words: Vec<u64>,
}

impl VarSet {
    pub fn empty(n: usize) -> Self {
        VarSet { n, words: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for w in &mut s.words {
            *w = u64::MAX;
        }
        if let Some(last) = s.words.last_mut() {
            *last &= tail_mask(n);
        }
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self, BitsError> {
        let mut s = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(BitsError::IndexOutOfRange { index: i, len: n });
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "index {i} out of range for universe {}", self.n);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.n);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> VarSet {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        if let Some(last) = out.words.last_mut() {
            *last &= tail_mask(self.n);
        }
        out
    }

    pub fn union_with(&mut self, other: &VarSet) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &VarSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_roundtrip_binary() {
        let s = BitString::parse_binary("0110100").unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(s.to_string(), "0110100");
        assert_eq!(s.count_ones(), 3);
    }

    #[test]
    fn bitstring_hex_msb_first() {
        // 0xa3 = 1010_0011 with the most significant bit consumed first.
        let s = BitString::parse_hex("a3", 8).unwrap();
        assert_eq!(s.to_string(), "10100011");
        assert_eq!(s.to_hex(), "a3");
        // Truncation keeps the leading bits.
        let t = BitString::parse_hex("a3", 5).unwrap();
        assert_eq!(t.to_string(), "10100");
    }

    #[test]
    fn bitstring_hex_padding() {
        let s = BitString::parse_binary("101").unwrap();
        assert_eq!(s.to_hex(), "a");
        assert_eq!(BitString::parse_hex("a", 3).unwrap(), s);
    }

    #[test]
    fn varset_complement_and_iter() {
        let v = VarSet::from_indices(70, [0, 64, 69]).unwrap();
        assert_eq!(v.len(), 3);
        let c = v.complement();
        assert_eq!(c.len(), 67);
        assert!(!c.contains(64));
        assert!(c.contains(1));
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![0, 64, 69]);
    }

    #[test]
    fn varset_full_tail_clean() {
        let v = VarSet::full(65);
        assert_eq!(v.len(), 65);
        assert_eq!(v.words()[1], 1);
    }
}
