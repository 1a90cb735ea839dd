//! Find a nonzero row of a turnstile matrix `A ∈ Z^{n×d}`.
//!
//! Both modes track `y = A x` for a random test vector `x ∈ [-n^3, n^3]^d`.
//! The pseudo-deterministic mode stores `x` and `y` and reports the smallest
//! `i` with `y_i ≠ 0`. The randomized mode reads `x_j` from Nisan's generator
//! and feeds `y` to an ℓ0 sampler, reporting its sample.

use rand::Rng;

use crate::error::{Error, Result};
use crate::randomness::field::ceil_log2;
use crate::randomness::{tags, PrgSeed, PrgSpec, Seed};
use crate::samplers::{L0Config, L0Sampler};
use crate::stream::{SpaceMeter, TurnstileUpdate};

/// Space parameter multiplier: `s = c * ceil(log2 n)`.
pub const PRG_SPACE_FACTOR: u32 = 8;

fn cube(n: u64) -> i64 {
    (n as i64).pow(3)
}

fn check(n: u64, d: u64, u: &TurnstileUpdate) -> Result<()> {
    if u.row == 0 || u.row > n || u.col == 0 || u.col > d {
        return Err(Error::Domain(format!("entry ({}, {}) outside [{n}]x[{d}]", u.row, u.col)));
    }
    // a single update cannot move an entry across more than [-n^3, n^3]
    if (u.delta as i128).abs() > 2 * cube(n) as i128 {
        return Err(Error::ModelViolation(format!("delta {} breaks the entry bound n^3 = {}", u.delta, cube(n))));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct NonzeroRowPd {
    n: u64,
    d: u64,
    x: Vec<i64>,
    y: Vec<i128>,
    meter: SpaceMeter,
}

impl NonzeroRowPd {
    pub fn new(n: u64, d: u64, seed: &Seed, word_bits: u32) -> Result<Self> {
        let bound = cube(n);
        let mut rng = seed.rng_for(tags::NONZERO_ROW_X, 0);
        let x = (0..d).map(|_| rng.random_range(-bound..=bound)).collect();
        Self::with_vector(n, x, word_bits)
    }

    pub fn with_vector(n: u64, x: Vec<i64>, word_bits: u32) -> Result<Self> {
        let d = x.len() as u64;
        if n == 0 || d == 0 {
            return Err(Error::InvalidSpec("matrix dimensions must be positive".into()));
        }
        if n > 1 << 20 {
            return Err(Error::InvalidSpec(format!("n = {n} too large for the n^3 entry range")));
        }
        let mut meter = SpaceMeter::new(word_bits);
        meter.charge((n + d) as i64)?;
        Ok(NonzeroRowPd { n, d, x, y: vec![0; n as usize], meter })
    }

    pub fn x(&self) -> &[i64] {
        &self.x
    }

    pub fn y(&self) -> &[i128] {
        &self.y
    }

    pub fn meter(&self) -> &SpaceMeter {
        &self.meter
    }

    pub fn update(&mut self, u: TurnstileUpdate) -> Result<()> {
        check(self.n, self.d, &u)?;
        self.y[(u.row - 1) as usize] += u.delta as i128 * self.x[(u.col - 1) as usize] as i128;
        Ok(())
    }

    pub fn query(&self) -> Option<u64> {
        self.y.iter().position(|&v| v != 0).map(|i| i as u64 + 1)
    }
}

#[derive(Debug, Clone)]
pub struct NonzeroRowRand {
    n: u64,
    d: u64,
    prg: PrgSeed,
    bits_per_entry: u32,
    l0: L0Sampler,
    meter: SpaceMeter,
}

impl NonzeroRowRand {
    pub fn prg_spec(n: u64, d: u64) -> Result<PrgSpec> {
        let s = (PRG_SPACE_FACTOR * ceil_log2(n).max(1)).min(63);
        PrgSpec::new(s, d * Self::bits_per_entry(n) as u64)
    }

    /// Bits per test-vector entry: `ceil(log2(2n^3 + 1))`.
    pub fn bits_per_entry(n: u64) -> u32 {
        ceil_log2(2 * cube(n) as u64 + 1)
    }

    pub fn new(n: u64, d: u64, seed: &Seed, word_bits: u32) -> Result<Self> {
        if n == 0 || d == 0 || n > 1 << 20 {
            return Err(Error::InvalidSpec(format!("unsupported dimensions {n}x{d}")));
        }
        let prg = PrgSeed::sample(Self::prg_spec(n, d)?, &mut seed.rng_for(tags::PRG, 0));
        let l0 = L0Sampler::new(L0Config::new(n), seed)?;
        let mut meter = SpaceMeter::new(word_bits);
        let seed_words = prg.spec().seed_bits().div_ceil(word_bits.max(1) as u64);
        meter.charge((seed_words + l0.words()) as i64)?;
        Ok(NonzeroRowRand { n, d, bits_per_entry: Self::bits_per_entry(n), prg, l0, meter })
    }

    pub fn meter(&self) -> &SpaceMeter {
        &self.meter
    }

    /// `x_j ∈ [-n^3, n^3]` from bits `(j-1)B .. jB` of the generator.
    pub fn x(&self, j: u64) -> Result<i64> {
        if j == 0 || j > self.d {
            return Err(Error::Domain(format!("column {j} outside [1, {}]", self.d)));
        }
        let b = self.bits_per_entry;
        let raw = self.prg.bits_le((j - 1) * b as u64, b)?;
        let modulus = 2 * cube(self.n) as u64 + 1;
        Ok((raw % modulus) as i64 - cube(self.n))
    }

    pub fn update(&mut self, u: TurnstileUpdate) -> Result<()> {
        check(self.n, self.d, &u)?;
        if u.delta == 0 {
            return Ok(());
        }
        let v = u.delta as i128 * self.x(u.col)? as i128;
        let v = i64::try_from(v).map_err(|_| Error::ModelViolation(format!("product {v} overflows")))?;
        self.l0.update(u.row, v)
    }

    pub fn query(&self) -> Option<u64> {
        self.l0.query()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pd_direct_formula() {
        let mut st = NonzeroRowPd::new(4, 3, &Seed::from_u64(1), 4).unwrap();
        assert_eq!(st.query(), None);
        st.update(TurnstileUpdate::matrix(2, 1, 0)).unwrap();
        assert!(st.y().iter().all(|&v| v == 0));
        st.update(TurnstileUpdate::matrix(2, 1, 3)).unwrap();
        let x1 = st.x()[0] as i128;
        assert_eq!(st.y(), &[0, 3 * x1, 0, 0]);
        st.update(TurnstileUpdate::matrix(2, 1, -3)).unwrap();
        assert_eq!(st.query(), None);
        assert!(matches!(st.update(TurnstileUpdate::matrix(1, 1, 129)), Err(Error::ModelViolation(_))));
        assert!(st.update(TurnstileUpdate::matrix(5, 1, 1)).is_err());
    }

    #[test]
    fn pd_smallest_row() {
        for s in 0..50 {
            let mut st = NonzeroRowPd::new(8, 4, &Seed::from_u64(s), 4).unwrap();
            st.update(TurnstileUpdate::matrix(5, 2, 7)).unwrap();
            st.update(TurnstileUpdate::matrix(3, 4, -1)).unwrap();
            // the test vector can annihilate a row only through a zero coordinate here
            let expect = if st.x()[3] != 0 {
                Some(3)
            } else if st.x()[1] != 0 {
                Some(5)
            } else {
                None
            };
            assert_eq!(st.query(), expect);
        }
    }

    #[test]
    fn test_vector_in_range() {
        let st = NonzeroRowRand::new(32, 32, &Seed::from_u64(3), 5).unwrap();
        assert_eq!(NonzeroRowRand::bits_per_entry(32), 17);
        let xs: Vec<i64> = (1..=32).map(|j| st.x(j).unwrap()).collect();
        assert!(xs.iter().all(|x| x.abs() <= 32768));
        assert!(xs.iter().any(|&x| x != xs[0]));
        assert!(st.x(33).is_err());
    }

    #[test]
    fn randomized_single_row() {
        for s in 0..100 {
            let mut st = NonzeroRowRand::new(16, 8, &Seed::from_u64(s), 4).unwrap();
            assert_eq!(st.query(), None);
            st.update(TurnstileUpdate::matrix(11, 3, 2)).unwrap();
            st.update(TurnstileUpdate::matrix(11, 5, -1)).unwrap();
            if st.x(3).unwrap() * 2 != st.x(5).unwrap() {
                assert_eq!(st.query(), Some(11));
            }
        }
    }
}
