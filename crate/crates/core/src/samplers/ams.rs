//! Second-moment sketch with bucketed counters.
//!
//! Repetition `r` keeps `w` counters; coordinate `i` adds `σ_r(i)·x_i` to
//! counter `b_r(i)`, with `b_r` pairwise and `σ_r` 4-wise independent. The
//! sum of squared counters of a repetition is an unbiased estimate of
//! `‖x‖₂²` with variance at most `2‖x‖₂⁴ / w`; the sketch reports the median
//! over repetitions.

use crate::error::{Error, Result};
use crate::randomness::field::ceil_log2;
use crate::randomness::{tags, HashFamilySpec, HashFunction, Seed, SignHash};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmsConfig {
    pub n: u64,
    pub width: usize,
    pub repetitions: usize,
}

impl AmsConfig {
    /// Width `ceil(6 / eps²)`, `ceil(3 log2 n)` repetitions.
    pub fn for_error(n: u64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidSpec(format!("AMS error {eps} outside (0, 1)")));
        }
        Ok(AmsConfig { n, width: (6.0 / (eps * eps)).ceil() as usize, repetitions: Self::default_repetitions(n) })
    }

    pub fn default_repetitions(n: u64) -> usize {
        (3 * ceil_log2(n) as usize).max(1)
    }
}

#[derive(Debug, Clone)]
struct Repetition {
    bucket: HashFunction,
    sign: SignHash,
    counters: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct AmsSketch {
    cfg: AmsConfig,
    reps: Vec<Repetition>,
}

impl AmsSketch {
    pub fn new(cfg: AmsConfig, seed: &Seed) -> Result<Self> {
        if cfg.n == 0 || cfg.width == 0 || cfg.repetitions == 0 {
            return Err(Error::InvalidSpec("AMS sketch needs positive n, width and repetitions".into()));
        }
        let bucket_spec = HashFamilySpec::new(cfg.n, cfg.width as u64, 2)?;
        let reps = (0..cfg.repetitions as u64)
            .map(|r| {
                Ok(Repetition {
                    bucket: HashFunction::sample(bucket_spec, &mut seed.rng_for(tags::AMS_BUCKET, r)),
                    sign: SignHash::sample(cfg.n, 4, &mut seed.rng_for(tags::AMS_SIGN, r))?,
                    counters: vec![0; cfg.width],
                })
            })
            .collect::<Result<_>>()?;
        Ok(AmsSketch { cfg, reps })
    }

    pub fn config(&self) -> &AmsConfig {
        &self.cfg
    }

    /// Counters plus two bucket and four sign coefficients per repetition.
    pub fn words(&self) -> u64 {
        (self.cfg.repetitions * (self.cfg.width + 6)) as u64
    }

    /// Add `delta` at coordinate `i ∈ [1, n]`.
    pub fn update(&mut self, i: u64, delta: i64) -> Result<()> {
        if i == 0 || i > self.cfg.n {
            return Err(Error::Domain(format!("coordinate {i} outside [1, {}]", self.cfg.n)));
        }
        for rep in &mut self.reps {
            let b = rep.bucket.apply(i - 1) as usize;
            rep.counters[b] += rep.sign.apply(i - 1) as i64 * delta;
        }
        Ok(())
    }

    /// Counter `t` of repetition `r`.
    pub fn counter(&self, r: usize, t: usize) -> i64 {
        self.reps[r].counters[t]
    }

    /// Counter-wise sum with a sketch built from the same seed.
    pub fn merge(&mut self, other: &AmsSketch) -> Result<()> {
        if self.cfg != other.cfg
            || self.reps.iter().zip(&other.reps).any(|(a, b)| a.bucket != b.bucket || a.sign != b.sign)
        {
            return Err(Error::Precondition("sketches do not share randomness".into()));
        }
        for (a, b) in self.reps.iter_mut().zip(&other.reps) {
            a.counters.iter_mut().zip(&b.counters).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    /// Per-repetition estimates of `‖x‖₂²`, exact integers.
    pub fn repetition_estimates(&self) -> Vec<u128> {
        self.reps.iter().map(|r| r.counters.iter().map(|&c| (c as i128 * c as i128) as u128).sum()).collect()
    }

    /// Lower median of the repetition estimates of `‖x‖₂²`.
    pub fn estimate_squared(&self) -> u128 {
        let mut v = self.repetition_estimates();
        v.sort_unstable();
        v[(v.len() - 1) / 2]
    }

    pub fn estimate_l2(&self) -> f64 {
        (self.estimate_squared() as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AmsConfig {
        AmsConfig::for_error(64, 0.25).unwrap()
    }

    #[test]
    fn zero_and_single_coordinate_exact() {
        let s = AmsSketch::new(cfg(), &Seed::from_u64(1)).unwrap();
        assert_eq!(s.estimate_squared(), 0);
        let mut s = AmsSketch::new(cfg(), &Seed::from_u64(1)).unwrap();
        s.update(1, 3).unwrap();
        assert_eq!(s.estimate_l2(), 3.0);
    }

    #[test]
    fn two_coordinates_within_error() {
        let eps = 0.25;
        let mut within = 0;
        for seed in 0..1000 {
            let mut s = AmsSketch::new(cfg(), &Seed::from_u64(seed)).unwrap();
            s.update(5, 3).unwrap();
            s.update(9, 4).unwrap();
            let e = s.estimate_squared() as f64;
            within += (e >= 25.0 * (1.0 - eps) && e <= 25.0 * (1.0 + eps)) as u32;
        }
        // failure only when the two coordinates share a bucket in most repetitions
        assert!(within >= 995, "{within}");
    }

    #[test]
    fn linearity() {
        let seed = Seed::from_u64(7);
        let mut a = AmsSketch::new(cfg(), &seed).unwrap();
        let mut b = AmsSketch::new(cfg(), &seed).unwrap();
        for (i, d) in [(1u64, 5i64), (7, -2), (64, 9)] {
            a.update(i, d).unwrap();
            b.update(i, -d).unwrap();
        }
        a.merge(&b).unwrap();
        assert!((0..a.cfg.repetitions).all(|r| (0..a.cfg.width).all(|t| a.counter(r, t) == 0)));
        let other = AmsSketch::new(cfg(), &Seed::from_u64(8)).unwrap();
        assert!(a.merge(&other).is_err());
    }
}
