//! ℓ0 sampling of a turnstile vector over `[n]` (1-based coordinates).
//!
//! Each repetition holds `L = ceil(log2 n) + 1` one-sparse recoverers; level
//! `j` sees coordinate `i` iff a 4-wise independent hash `g(i) ∈ [2^31)`
//! satisfies `g(i) < 2^31 >> j`. A query returns the coordinate isolated by
//! the first passing level of the first repetition with one, or `None`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::randomness::field::{add_mod, ceil_log2, is_prime, mul_mod, pow_mod, reduce_signed};
use crate::randomness::{tags, HashFamilySpec, HashFunction, Seed};

/// `2^61 − 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;
const SUBSAMPLE_RANGE: u64 = 1 << 31;
const SUBSAMPLE_INDEPENDENCE: usize = 4;

/// Exact one-sparse test over `(Σv, Σi·v, Σv·z^i mod p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneSparseRecoverer {
    weight: i128,
    index_sum: i128,
    fingerprint: u64,
}

impl OneSparseRecoverer {
    pub fn new() -> Self {
        OneSparseRecoverer { weight: 0, index_sum: 0, fingerprint: 0 }
    }

    pub fn weight(&self) -> i128 {
        self.weight
    }

    pub fn index_sum(&self) -> i128 {
        self.index_sum
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn is_zero(&self) -> bool {
        self.weight == 0 && self.index_sum == 0 && self.fingerprint == 0
    }

    /// `z_pow = z^i mod p`, supplied by the caller to share the power.
    pub fn update(&mut self, i: u64, delta: i64, z_pow: u64, p: u64) {
        self.weight += delta as i128;
        self.index_sum += i as i128 * delta as i128;
        self.fingerprint = add_mod(self.fingerprint, mul_mod(reduce_signed(delta as i128, p), z_pow, p), p);
    }

    /// The single live coordinate, if the fingerprint certifies one.
    pub fn recover(&self, n: u64, z: u64, p: u64) -> Option<u64> {
        if self.weight == 0 || self.index_sum % self.weight != 0 {
            return None;
        }
        let i = self.index_sum / self.weight;
        if i < 1 || i > n as i128 {
            return None;
        }
        let i = i as u64;
        let expect = mul_mod(reduce_signed(self.weight, p), pow_mod(z, i, p), p);
        (expect == self.fingerprint).then_some(i)
    }
}

impl Default for OneSparseRecoverer {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct L0Config {
    pub n: u64,
    pub repetitions: usize,
    pub prime: u64,
}

impl L0Config {
    /// `ceil(log2 n) + 1` repetitions over `GF(2^61 − 1)`.
    pub fn new(n: u64) -> Self {
        L0Config { n, repetitions: ceil_log2(n) as usize + 1, prime: MERSENNE_61 }
    }

    pub fn levels(&self) -> usize {
        ceil_log2(self.n) as usize + 1
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.repetitions == 0 {
            return Err(Error::InvalidSpec("ℓ0 sampler needs n >= 1 and at least one repetition".into()));
        }
        if !is_prime(self.prime) || self.prime <= self.n {
            return Err(Error::InvalidSpec(format!("fingerprint modulus {} must be a prime above n", self.prime)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Repetition {
    subsample: HashFunction,
    z: u64,
    levels: Vec<OneSparseRecoverer>,
}

#[derive(Debug, Clone)]
pub struct L0Sampler {
    cfg: L0Config,
    reps: Vec<Repetition>,
}

impl L0Sampler {
    pub fn new(cfg: L0Config, seed: &Seed) -> Result<Self> {
        cfg.validate()?;
        let spec = Self::subsample_spec(cfg.n)?;
        let reps = (0..cfg.repetitions as u64)
            .map(|r| {
                let subsample = HashFunction::sample(spec, &mut seed.rng_for(tags::L0_SUBSAMPLE, r));
                let z = seed.rng_for(tags::L0_FINGERPRINT, r).random_range(1..cfg.prime);
                (subsample, z)
            })
            .collect::<Vec<_>>();
        Self::from_parts(cfg, reps)
    }

    /// Family of the subsampling hashes for universe `[n]`.
    pub fn subsample_spec(n: u64) -> Result<HashFamilySpec> {
        HashFamilySpec::new(n, SUBSAMPLE_RANGE, SUBSAMPLE_INDEPENDENCE)
    }

    /// Explicit randomness: one `(subsample hash, z)` pair per repetition.
    pub fn from_parts(cfg: L0Config, parts: Vec<(HashFunction, u64)>) -> Result<Self> {
        cfg.validate()?;
        if parts.len() != cfg.repetitions {
            return Err(Error::InvalidSpec("one subsample hash and point per repetition".into()));
        }
        let reps = parts
            .into_iter()
            .map(|(subsample, z)| {
                if subsample.spec().universe_size() != cfg.n || subsample.spec().range_size() != SUBSAMPLE_RANGE {
                    return Err(Error::InvalidSpec("subsample hash has the wrong shape".into()));
                }
                if z == 0 || z >= cfg.prime {
                    return Err(Error::InvalidSpec(format!("fingerprint point {z} outside [1, p)")));
                }
                Ok(Repetition { subsample, z, levels: vec![OneSparseRecoverer::new(); cfg.levels()] })
            })
            .collect::<Result<_>>()?;
        Ok(L0Sampler { cfg, reps })
    }

    pub fn config(&self) -> &L0Config {
        &self.cfg
    }

    /// Stored words: three per recoverer, plus the point and the hash
    /// coefficients of each repetition.
    pub fn words(&self) -> u64 {
        (self.cfg.repetitions * (3 * self.cfg.levels() + 1 + SUBSAMPLE_INDEPENDENCE)) as u64
    }

    /// Add `delta` at coordinate `i ∈ [1, n]`.
    pub fn update(&mut self, i: u64, delta: i64) -> Result<()> {
        if i == 0 || i > self.cfg.n {
            return Err(Error::Domain(format!("coordinate {i} outside [1, {}]", self.cfg.n)));
        }
        if delta == 0 {
            return Ok(());
        }
        let p = self.cfg.prime;
        for rep in &mut self.reps {
            let g = rep.subsample.apply(i - 1);
            let z_pow = pow_mod(rep.z, i, p);
            for (j, level) in rep.levels.iter_mut().enumerate() {
                if g >= SUBSAMPLE_RANGE >> j {
                    break;
                }
                level.update(i, delta, z_pow, p);
            }
        }
        Ok(())
    }

    pub fn query(&self) -> Option<u64> {
        self.reps.iter().find_map(|rep| rep.levels.iter().find_map(|lv| lv.recover(self.cfg.n, rep.z, self.cfg.prime)))
    }

    /// Recoverer at `level` of repetition `rep`.
    pub fn recoverer(&self, rep: usize, level: usize) -> &OneSparseRecoverer {
        &self.reps[rep].levels[level]
    }

    pub fn is_zero(&self) -> bool {
        self.reps.iter().all(|r| r.levels.iter().all(OneSparseRecoverer::is_zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_restores_zero() {
        let mut s = L0Sampler::new(L0Config::new(16), &Seed::from_u64(1)).unwrap();
        s.update(3, 1).unwrap();
        assert!(!s.is_zero());
        s.update(3, -1).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.query(), None);
    }

    #[test]
    fn single_update_triple() {
        let mut s = L0Sampler::new(L0Config::new(16), &Seed::from_u64(2)).unwrap();
        s.update(2, 5).unwrap();
        let r = s.recoverer(0, 0);
        let z = s.reps[0].z;
        assert_eq!((r.weight(), r.index_sum()), (5, 10));
        assert_eq!(r.fingerprint(), mul_mod(5, pow_mod(z, 2, MERSENNE_61), MERSENNE_61));
        assert_eq!(s.query(), Some(2));
    }

    #[test]
    fn false_positive_count_bounded_by_degree() {
        // every vector over [4] with entries in {-2..2}, every z in GF(11)
        let (n, p) = (4u64, 11u64);
        let mut vectors = vec![vec![]];
        for _ in 0..n {
            vectors = vectors
                .into_iter()
                .flat_map(|v: Vec<i64>| (-2..=2).map(move |x| [v.clone(), vec![x]].concat()))
                .collect();
        }
        let mut false_pos = 0u64;
        let mut total = 0u64;
        for v in &vectors {
            let support: Vec<u64> = (1..=n).filter(|&i| v[i as usize - 1] != 0).collect();
            let mut bad_z = 0;
            for z in 1..p {
                let mut r = OneSparseRecoverer::new();
                for i in 1..=n {
                    r.update(i, v[i as usize - 1], pow_mod(z, i, p), p);
                }
                match r.recover(n, z, p) {
                    Some(i) if support == [i] => {}
                    Some(_) => bad_z += 1,
                    None => assert_ne!(support.len(), 1, "true one-sparse vector rejected"),
                }
                total += 1;
            }
            // nonzero polynomial of degree <= n has at most n roots
            assert!(bad_z <= n, "{v:?}");
            false_pos += bad_z;
        }
        assert!((false_pos as f64) / (total as f64) <= n as f64 / p as f64);
    }

    #[test]
    fn zero_vector_fails_and_one_sparse_recovered() {
        let cfg = L0Config::new(64);
        let s = L0Sampler::new(cfg, &Seed::from_u64(5)).unwrap();
        assert_eq!(s.query(), None);
        for seed in 0..200 {
            let mut s = L0Sampler::new(cfg, &Seed::from_u64(seed)).unwrap();
            s.update(17, -3).unwrap();
            assert_eq!(s.query(), Some(17));
        }
    }

    #[test]
    fn near_uniform_over_support() {
        let n = 64;
        let support: Vec<u64> = (0..16).map(|k| 3 + 4 * k).collect();
        let mut counts = std::collections::BTreeMap::new();
        let trials = 10_000;
        for seed in 0..trials {
            let mut s = L0Sampler::new(L0Config::new(n), &Seed::from_u64(seed)).unwrap();
            for (k, &i) in support.iter().enumerate() {
                s.update(i, 1 + k as i64 % 3).unwrap();
            }
            *counts.entry(s.query()).or_insert(0u64) += 1;
        }
        assert!(counts.keys().all(|k| k.is_some_and(|i| support.contains(&i))));
        let tv: f64 = support
            .iter()
            .map(|&i| (*counts.get(&Some(i)).unwrap_or(&0) as f64 / trials as f64 - 1.0 / 16.0).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.1, "tv {tv}");
    }

    #[test]
    fn rejects_bad_config() {
        assert!(L0Sampler::new(L0Config { n: 8, repetitions: 1, prime: 7 }, &Seed::from_u64(0)).is_err());
        assert!(L0Sampler::new(L0Config { n: 8, repetitions: 0, prime: 11 }, &Seed::from_u64(0)).is_err());
        let mut s = L0Sampler::new(L0Config::new(8), &Seed::from_u64(0)).unwrap();
        assert!(s.update(9, 1).is_err());
        assert!(s.update(0, 1).is_err());
    }
}
