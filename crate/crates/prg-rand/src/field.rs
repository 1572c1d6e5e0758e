//! Binary extension fields GF(2^b) for b in 1..=16.
//!
//! Each degree uses a fixed irreducible polynomial from the standard tables,
//! so all derived hash values are bit-exact across runs and platforms.
//! Elements are packed into the low `b` bits of a `u32`; multiplication is
//! carry-less followed by reduction.

use crate::PrimitiveError;

/// Irreducible polynomials, index = degree; entry includes the leading term.
const POLYS: [u32; 17] = [
    0,
    0b11,                // x + 1
    0b111,               // x^2 + x + 1
    0b1011,              // x^3 + x + 1
    0b1_0011,            // x^4 + x + 1
    0b10_0101,           // x^5 + x^2 + 1
    0b100_0011,          // x^6 + x + 1
    0b1000_0011,         // x^7 + x + 1
    0b1_0001_1011,       // x^8 + x^4 + x^3 + x + 1
    0b10_0001_0001,      // x^9 + x^4 + 1
    0b100_0000_1001,     // x^10 + x^3 + 1
    0b1000_0000_0101,    // x^11 + x^2 + 1
    0b1_0000_0101_0011,  // x^12 + x^6 + x^4 + x + 1
    0b10_0000_0001_1011, // x^13 + x^4 + x^3 + x + 1
    0b100_0100_0100_0011, // x^14 + x^10 + x^6 + x + 1
    0b1000_0000_0000_0011, // x^15 + x + 1
    0b1_0001_0000_0000_1011, // x^16 + x^12 + x^3 + x + 1
];

/// GF(2^b) with a fixed irreducible modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryField {
    degree: u32,
    poly: u32,
}

impl BinaryField {
    pub fn new(degree: u32) -> Result<Self, PrimitiveError> {
        if degree == 0 || degree > 16 {
            return Err(PrimitiveError::UnsupportedFieldDegree(degree));
        }
        Ok(BinaryField { degree, poly: POLYS[degree as usize] })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        1u64 << self.degree
    }

    pub fn modulus(&self) -> u32 {
        self.poly
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < (1 << self.degree) && b < (1 << self.degree));
        // Carry-less product; fits in 2b - 1 <= 31 bits.
        let mut prod: u32 = 0;
        let mut a = a;
        let mut b_shifted = b;
        while a != 0 {
            if a & 1 == 1 {
                prod ^= b_shifted;
            }
            a >>= 1;
            b_shifted <<= 1;
        }
        // Reduce modulo the field polynomial.
        let b = self.degree;
        let mut bit = 31u32;
        while bit >= b {
            if prod & (1 << bit) != 0 {
                prod ^= self.poly << (bit - b);
            }
            if bit == 0 {
                break;
            }
            bit -= 1;
        }
        prod
    }

    /// Horner evaluation of the polynomial with `coeffs[0]` the leading
    /// coefficient.
    pub fn poly_eval(&self, coeffs: &[u32], x: u32) -> u32 {
        let mut acc = 0u32;
        for &c in coeffs {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }
}
