//! Binary extension fields `GF(2^s)` for `1 <= s <= 63`.
//!
//! Elements are bit vectors in a `u64`; the modulus is the numerically
//! smallest irreducible polynomial of degree `s`, found by Rabin's test.

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2Field {
    degree: u32,
    /// Modulus including the `x^s` term.
    modulus: u64,
}

impl Gf2Field {
    pub const MAX_DEGREE: u32 = 63;

    pub fn new(degree: u32) -> Option<Self> {
        if degree == 0 || degree > Self::MAX_DEGREE {
            return None;
        }
        static MODULI: [OnceLock<u64>; 64] = [const { OnceLock::new() }; 64];
        let modulus = *MODULI[degree as usize].get_or_init(|| {
            let top = 1u64 << degree;
            // odd candidates only: anything divisible by x is reducible
            (0..top)
                .map(|low| top | low)
                .find(|&f| f & 1 == 1 && is_irreducible(f, degree))
                .expect("an irreducible polynomial exists in every degree")
        });
        Some(Gf2Field { degree, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn mask(&self) -> u64 {
        (1u64 << self.degree) - 1
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.modulus, self.degree)
    }
}

#[inline]
fn mul_mod(mut a: u64, mut b: u64, modulus: u64, degree: u32) -> u64 {
    let top = 1u64 << degree;
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn poly_degree(a: u64) -> i32 {
    63 - a.leading_zeros() as i32
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// `x^(2^k) mod f`.
fn frobenius_power(k: u32, f: u64, degree: u32) -> u64 {
    let mut h = poly_rem(0b10, f);
    for _ in 0..k {
        h = mul_mod(h, h, f, degree);
    }
    h
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin: `f` of degree `s` is irreducible iff `x^(2^s) ≡ x (mod f)` and
/// `gcd(x^(2^(s/q)) - x, f) = 1` for every prime `q | s`.
fn is_irreducible(f: u64, degree: u32) -> bool {
    let x = poly_rem(0b10, f);
    if frobenius_power(degree, f, degree) != x {
        return false;
    }
    prime_factors(degree).into_iter().all(|q| {
        let h = frobenius_power(degree / q, f, degree) ^ x;
        poly_degree(poly_gcd(f, h)) == 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible(f: u64, degree: u32) -> bool {
        // no factor of degree 1..=degree/2
        (2u64..(1 << (degree / 2 + 1))).all(|g| poly_degree(g) == 0 || poly_rem(f, g) != 0)
    }

    #[test]
    fn rabin_matches_trial_division() {
        for degree in 2..=10u32 {
            for low in 0..(1u64 << degree) {
                let f = (1 << degree) | low;
                assert_eq!(is_irreducible(f, degree), brute_irreducible(f, degree), "{f:b}");
            }
        }
    }

    #[test]
    fn known_moduli() {
        assert_eq!(Gf2Field::new(8).unwrap().modulus(), 0x11b);
        assert_eq!(Gf2Field::new(2).unwrap().modulus(), 0b111);
        assert!(Gf2Field::new(0).is_none());
        assert!(Gf2Field::new(64).is_none());
        assert!(Gf2Field::new(63).is_some());
    }

    #[test]
    fn field_axioms_small() {
        let f = Gf2Field::new(4).unwrap();
        for a in 1..16 {
            let inverses = (1..16).filter(|&b| f.mul(a, b) == 1).count();
            assert_eq!(inverses, 1);
            for b in 0..16 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..16 {
                    assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                }
            }
        }
    }
}
