//! Arithmetic in GF(2ⁿ) for `1 ≤ n ≤ 12`, with elements as bit vectors of
//! polynomial coefficients (bit i is the coefficient of xⁱ).

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 12;

/// Fixed irreducible modulus per degree, including the leading term.
const MODULI: [u32; 13] = [
    0,
    0b11,               // x + 1
    0b111,              // x^2 + x + 1
    0b1011,             // x^3 + x + 1
    0b1_0011,           // x^4 + x + 1
    0b10_0101,          // x^5 + x^2 + 1
    0b100_0011,         // x^6 + x + 1
    0b1000_0011,        // x^7 + x + 1
    0b1_0001_1011,      // x^8 + x^4 + x^3 + x + 1
    0b10_0001_0001,     // x^9 + x^4 + 1
    0b100_0000_1001,    // x^10 + x^3 + 1
    0b1000_0000_0101,   // x^11 + x^2 + 1
    0b1_0000_0000_1001, // x^12 + x^3 + 1
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2n {
    degree: u32,
    modulus: u32,
}

impl Gf2n {
    pub fn new(degree: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("GF(2^n) supported for 1 <= n <= {MAX_DEGREE}, got {degree}")));
        }
        Ok(Self { degree, modulus: MODULI[degree as usize] })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        1 << self.degree
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    /// Carry-less multiply followed by reduction modulo the field polynomial.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let n = self.degree;
        let mut acc: u32 = 0;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & (1 << n) != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    pub fn pow(&self, a: u32, mut e: u32) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via `a^(2ⁿ-2)`; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow(a, self.order() - 2))
    }
}
