//! Pseudo-deterministic frequency estimation: Misra–Gries over pairwise
//! hashed keys.
//!
//! Elements of `[n]` are hashed into `[d]` with `d = m^3 * ceil(n * cap / m)`
//! (at least `m^3`), where `cap` is the summary capacity. Besides separating
//! the stream's own elements, this keeps every off-support index from landing
//! on a stored key except with probability about `1 / (m * cap)`, so the whole
//! answer vector is a function of the stream alone on all but a `1/m`
//! fraction of seeds.

use std::collections::BTreeMap;

use super::misra_gries::{capacity_for, MisraGries};
use crate::error::{Error, Result};
use crate::randomness::{tags, HashFamilySpec, HashFunction, Seed};
use crate::stream::SpaceMeter;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointQueryConfig {
    pub n: u64,
    /// Stream length, known in advance; it sizes the hash range.
    pub m: u64,
    pub epsilon: f64,
}

impl PointQueryConfig {
    pub fn capacity(&self) -> Result<usize> {
        capacity_for(self.epsilon)
    }

    pub fn hash_range(&self) -> Result<u64> {
        let cap = self.capacity()? as u128;
        let (n, m) = (self.n as u128, self.m.max(1) as u128);
        let d = m.pow(3) * (n * cap).div_ceil(m).max(1);
        u64::try_from(d)
            .ok()
            .filter(|&d| d <= 1 << 62)
            .ok_or_else(|| Error::InvalidSpec(format!("hash range {d} too large for n = {}, m = {}", self.n, self.m)))
    }

    pub fn hash_spec(&self) -> Result<HashFamilySpec> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("universe must be nonempty".into()));
        }
        HashFamilySpec::new(self.n, self.hash_range()?, 2)
    }
}

#[derive(Debug, Clone)]
pub struct PointQuery {
    n: u64,
    hash: HashFunction,
    summary: MisraGries<u64>,
    m_seen: u64,
    meter: SpaceMeter,
}

impl PointQuery {
    pub fn new(cfg: PointQueryConfig, seed: &Seed, word_bits: u32) -> Result<Self> {
        let hash = HashFunction::sample(cfg.hash_spec()?, &mut seed.rng_for(tags::HASH, 0));
        Self::with_hash(cfg, hash, word_bits)
    }

    pub fn with_hash(cfg: PointQueryConfig, hash: HashFunction, word_bits: u32) -> Result<Self> {
        if hash.spec().universe_size() != cfg.n || hash.spec().independence() > 2 {
            return Err(Error::InvalidSpec("point query needs an affine hash on [n]".into()));
        }
        let mut meter = SpaceMeter::new(word_bits);
        // two hash coefficients and the running length
        meter.charge(3)?;
        Ok(PointQuery { n: cfg.n, hash, summary: MisraGries::new(cfg.capacity()?)?, m_seen: 0, meter })
    }

    pub fn hash(&self) -> &HashFunction {
        &self.hash
    }

    pub fn m_seen(&self) -> u64 {
        self.m_seen
    }

    pub fn meter(&self) -> &SpaceMeter {
        &self.meter
    }

    pub fn summary(&self) -> &MisraGries<u64> {
        &self.summary
    }

    fn key(&self, element: u64) -> Result<u64> {
        if element == 0 || element > self.n {
            return Err(Error::Domain(format!("element {element} outside [1, {}]", self.n)));
        }
        Ok(self.hash.apply(element - 1))
    }

    pub fn update(&mut self, element: u64) -> Result<()> {
        self.update_weighted(element, 1)
    }

    pub fn update_weighted(&mut self, element: u64, weight: u64) -> Result<()> {
        let key = self.key(element)?;
        let before = self.summary.len() as i64;
        self.summary.insert_weighted(key, weight);
        self.m_seen += weight;
        // two words per stored (key, count)
        self.meter.charge(2 * (self.summary.len() as i64 - before))
    }

    pub fn query(&self, i: u64) -> Result<u64> {
        Ok(self.summary.query(&self.key(i)?))
    }

    /// Every nonzero answer, keyed by index. Equal to querying each `i ∈ [n]`
    /// and keeping the nonzero results; computed by inverting the hash on the
    /// stored keys.
    pub fn answer_vector(&self) -> BTreeMap<u64, u64> {
        self.hashed_answers().into_iter().map(|(i, _, c)| (i, c)).collect()
    }

    /// `(index, hashed id, count)` for every index with a nonzero answer.
    pub fn hashed_answers(&self) -> Vec<(u64, u64, u64)> {
        let mut out: Vec<(u64, u64, u64)> = self
            .summary
            .entries()
            .flat_map(|(&key, count)| {
                let pre = self.hash.preimages(key).expect("affine hash");
                pre.into_iter().map(move |x| (x + 1, key, count))
            })
            .collect();
        out.sort_unstable();
        out
    }
}
