//! Sequential consumption of seed bits.
//!
//! Seeds are flat bit strings consumed front to back; multi-bit reads are
//! big-endian (the first bit read becomes the most significant bit of the
//! value).

use prg_core::BitString;

use crate::PrimitiveError;

pub struct SeedReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> SeedReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        SeedReader { bits, pos: 0 }
    }

    /// Checks the seed holds exactly `expected` bits.
    pub fn expect_exact(bits: &'a BitString, expected: usize) -> Result<Self, PrimitiveError> {
        if bits.len() != expected {
            return Err(PrimitiveError::SeedLength { got: bits.len(), expected });
        }
        Ok(Self::new(bits))
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn take_bit(&mut self) -> Result<bool, PrimitiveError> {
        if self.pos >= self.bits.len() {
            return Err(PrimitiveError::SeedLength { got: self.bits.len(), expected: self.pos + 1 });
        }
        let b = self.bits.get(self.pos);
        self.pos += 1;
        Ok(b)
    }

    /// Reads `width` bits big-endian.
    pub fn take_value(&mut self, width: u32) -> Result<u32, PrimitiveError> {
        debug_assert!(width <= 32);
        let mut v = 0u32;
        for _ in 0..width {
            v = (v << 1) | self.take_bit()? as u32;
        }
        Ok(v)
    }

    /// Reads a contiguous slice of `len` bits as its own string.
    pub fn take_slice(&mut self, len: usize) -> Result<BitString, PrimitiveError> {
        if self.pos + len > self.bits.len() {
            return Err(PrimitiveError::SeedLength {
                got: self.bits.len(),
                expected: self.pos + len,
            });
        }
        let s = self.bits.slice(self.pos, len);
        self.pos += len;
        Ok(s)
    }
}
