//! Polynomial hash families over prime fields.
//!
//! A degree-`(t-1)` polynomial with uniformly random coefficients over
//! `GF(p)` is `t`-wise independent on `[0, p)`. Reducing the field value
//! modulo the range size `d` introduces a bias of at most `1/p` per value.

use rand::Rng;

use super::field::{add_mod, ceil_log2, inv_mod, is_prime, mul_mod, next_prime};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashFamilySpec {
    universe_size: u64,
    range_size: u64,
    independence: usize,
    prime: u64,
}

impl HashFamilySpec {
    /// Family `[n] -> [d]` over the smallest prime `p >= max(n, d)`.
    pub fn new(universe_size: u64, range_size: u64, independence: usize) -> Result<Self> {
        let p = next_prime(universe_size.max(range_size).max(2));
        Self::with_prime(universe_size, range_size, independence, p)
    }

    pub fn with_prime(universe_size: u64, range_size: u64, independence: usize, prime: u64) -> Result<Self> {
        if universe_size == 0 || range_size == 0 {
            return Err(Error::InvalidSpec("universe and range must be nonempty".into()));
        }
        if independence == 0 {
            return Err(Error::InvalidSpec("independence must be at least 1".into()));
        }
        if !is_prime(prime) {
            return Err(Error::InvalidSpec(format!("modulus {prime} is not prime")));
        }
        if prime < universe_size {
            return Err(Error::InvalidSpec(format!("prime {prime} is smaller than the universe {universe_size}")));
        }
        Ok(HashFamilySpec { universe_size, range_size, independence, prime })
    }

    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    pub fn range_size(&self) -> u64 {
        self.range_size
    }

    pub fn independence(&self) -> usize {
        self.independence
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Description length of one member: `t * ceil(log2 p)` bits.
    pub fn seed_bits(&self) -> u64 {
        self.independence as u64 * ceil_log2(self.prime) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HashFunction {
    spec: HashFamilySpec,
    /// `coefficients[i]` multiplies `x^i`.
    coefficients: Vec<u64>,
}

impl HashFunction {
    pub fn sample<R: Rng + ?Sized>(spec: HashFamilySpec, rng: &mut R) -> Self {
        let coefficients = (0..spec.independence).map(|_| rng.random_range(0..spec.prime)).collect();
        HashFunction { spec, coefficients }
    }

    pub fn from_coefficients(spec: HashFamilySpec, coefficients: Vec<u64>) -> Result<Self> {
        if coefficients.len() != spec.independence {
            return Err(Error::InvalidSpec(format!(
                "expected {} coefficients, got {}",
                spec.independence,
                coefficients.len()
            )));
        }
        if let Some(c) = coefficients.iter().find(|&&c| c >= spec.prime) {
            return Err(Error::InvalidSpec(format!("coefficient {c} is not a field element")));
        }
        Ok(HashFunction { spec, coefficients })
    }

    pub fn spec(&self) -> &HashFamilySpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// Evaluate at `x ∈ [0, universe_size)`.
    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.spec.universe_size {
            return Err(Error::Domain(format!("hash input {x} outside [0, {})", self.spec.universe_size)));
        }
        Ok(self.apply(x))
    }

    /// Evaluation without the domain check.
    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        debug_assert!(x < self.spec.universe_size);
        self.field_value(x) % self.spec.range_size
    }

    /// The polynomial's value in `GF(p)`, before range reduction.
    #[inline]
    pub fn field_value(&self, x: u64) -> u64 {
        let p = self.spec.prime;
        let x = x % p;
        self.coefficients.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }

    /// All `x` in the universe with `apply(x) == v`, for affine members only
    /// (`independence <= 2`). Returns `None` for higher-degree families.
    pub fn preimages(&self, v: u64) -> Option<Vec<u64>> {
        let p = self.spec.prime;
        let (n, d) = (self.spec.universe_size, self.spec.range_size);
        let (b, a) = match self.coefficients.as_slice() {
            [b] => (*b, 0),
            [b, a] => (*b, *a),
            _ => return None,
        };
        if v >= d {
            return Some(Vec::new());
        }
        let Some(a_inv) = inv_mod(a, p) else {
            return Some(if b % d == v { (0..n).collect() } else { Vec::new() });
        };
        let mut out = Vec::new();
        let mut u = v;
        while u < p {
            // a x + b = u  =>  x = (u - b) / a
            let x = mul_mod(add_mod(u, p - b, p), a_inv, p);
            if x < n {
                out.push(x);
            }
            match u.checked_add(d) {
                Some(next) => u = next,
                None => break,
            }
        }
        out.sort_unstable();
        Some(out)
    }
}

/// A `t`-wise independent map `[n] -> {+1, -1}`: hash into `[2]`, then
/// `0 ↦ +1` and `1 ↦ -1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignHash {
    inner: HashFunction,
}

impl SignHash {
    pub fn sample<R: Rng + ?Sized>(universe_size: u64, independence: usize, rng: &mut R) -> Result<Self> {
        let spec = Self::spec(universe_size, independence)?;
        Ok(SignHash { inner: HashFunction::sample(spec, rng) })
    }

    pub fn spec(universe_size: u64, independence: usize) -> Result<HashFamilySpec> {
        if independence < 2 {
            return Err(Error::InvalidSpec("sign hashes need independence >= 2".into()));
        }
        HashFamilySpec::new(universe_size, 2, independence)
    }

    pub fn from_hash(inner: HashFunction) -> Result<Self> {
        if inner.spec().range_size() != 2 {
            return Err(Error::InvalidSpec("sign hash must have range 2".into()));
        }
        Ok(SignHash { inner })
    }

    pub fn hash(&self) -> &HashFunction {
        &self.inner
    }

    pub fn sign(&self, x: u64) -> Result<i8> {
        self.inner.eval(x).map(to_sign)
    }

    #[inline]
    pub fn apply(&self, x: u64) -> i8 {
        to_sign(self.inner.apply(x))
    }
}

#[inline]
fn to_sign(bit: u64) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}
