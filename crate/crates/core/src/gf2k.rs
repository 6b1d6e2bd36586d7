//! Arithmetic in the binary extension fields GF(2^k), `1 ≤ k ≤ 8`.
//!
//! Elements are stored in the polynomial basis `1, t, …, t^{k-1}`, bit `i`
//! holding the coefficient of `t^i`.

use crate::error::{out_of_range, Result};

pub const MAX_K: u32 = 8;

/// Irreducible modulus for each degree, indexed by `k`, with the leading
/// term included.
pub const IRREDUCIBLE: [u16; 9] = [
    0,
    0b11,          // t + 1
    0b111,         // t^2 + t + 1
    0b1011,        // t^3 + t + 1
    0b1_0011,      // t^4 + t + 1
    0b10_0101,     // t^5 + t^2 + 1
    0b100_0011,    // t^6 + t + 1
    0b1000_0011,   // t^7 + t + 1
    0b1_0001_1011, // t^8 + t^4 + t^3 + t + 1
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2k {
    k: u32,
    modulus: u16,
}

impl Gf2k {
    pub fn new(k: u32) -> Result<Self> {
        if !(1..=MAX_K).contains(&k) {
            return Err(out_of_range("k", k, format!("1..={MAX_K}")));
        }
        Ok(Self {
            k,
            modulus: IRREDUCIBLE[k as usize],
        })
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> usize {
        1 << self.k
    }

    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    pub fn mul(&self, mut a: u16, mut b: u16) -> u16 {
        let top = 1u16 << self.k;
        let mut acc = 0u16;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    pub fn pow(&self, base: u16, mut exp: u64) -> u16 {
        let (mut base, mut acc) = (base, 1u16);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u16) -> Option<u16> {
        (a != 0).then(|| self.pow(a, self.order() as u64 - 2))
    }

    /// Absolute trace `a + a^2 + a^4 + … + a^{2^{k-1}}`, an element of GF(2).
    pub fn trace(&self, a: u16) -> u8 {
        let (mut term, mut acc) = (a, a);
        for _ in 1..self.k {
            term = self.mul(term, term);
            acc ^= term;
        }
        debug_assert!(acc <= 1, "trace must land in the prime field");
        acc as u8
    }

    /// The symmetric GF(2) matrix `S[i][j] = tr(α · t^i · t^j)` of the
    /// bilinear form `(x, y) ↦ tr(α x y)` in the polynomial basis.
    pub fn trace_form(&self, alpha: u16) -> Vec<Vec<u8>> {
        let k = self.k as usize;
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| self.trace(self.mul(alpha, self.mul(1 << i, 1 << j))))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Remainder of polynomial division over GF(2).
    fn poly_rem(mut a: u32, b: u32) -> u32 {
        let db = 31 - b.leading_zeros();
        while a != 0 && 31 - a.leading_zeros() >= db {
            a ^= b << (31 - a.leading_zeros() - db);
        }
        a
    }

    #[test]
    fn moduli_are_irreducible() {
        for k in 1..=MAX_K {
            let p = IRREDUCIBLE[k as usize] as u32;
            assert_eq!(31 - p.leading_zeros(), k);
            // no divisor of degree 1..=k/2
            for q in 2u32..(1 << (k / 2 + 1)) {
                assert_ne!(poly_rem(p, q), 0, "k={k}: {q:b} divides {p:b}");
            }
        }
    }

    #[test]
    fn field_axioms() {
        for k in 1..=6 {
            let f = Gf2k::new(k).unwrap();
            for a in 0..f.order() as u16 {
                assert_eq!(f.mul(a, 1), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..f.order() as u16 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn trace_is_balanced_and_linear() {
        for k in 1..=MAX_K {
            let f = Gf2k::new(k).unwrap();
            let ones: usize = (0..f.order() as u16).map(|a| f.trace(a) as usize).sum();
            assert_eq!(ones, f.order() / 2);
            assert_eq!(f.trace(f.add(3 % f.order() as u16, 1)), f.trace(3 % f.order() as u16) ^ f.trace(1));
        }
    }

    #[test]
    fn trace_form_nonsingular_for_nonzero_alpha() {
        for k in 1..=5 {
            let f = Gf2k::new(k).unwrap();
            for alpha in 1..f.order() as u16 {
                let s = f.trace_form(alpha);
                // x ↦ S x is injective
                let mut seen = std::collections::HashSet::new();
                for x in 0..f.order() {
                    let img: Vec<u8> = s
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .map(|(j, &v)| v & ((x >> j) & 1) as u8)
                                .fold(0, |a, b| a ^ b)
                        })
                        .collect();
                    assert!(seen.insert(img));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_degree() {
        assert!(Gf2k::new(0).is_err());
        assert!(Gf2k::new(9).is_err());
    }
}
