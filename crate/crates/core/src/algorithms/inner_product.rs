//! Inner product of two insertion-only vectors from two point-query
//! summaries that share one hash.

use std::collections::BTreeMap;

use super::point_query::{PointQuery, PointQueryConfig};
use crate::error::{Error, Result};
use crate::randomness::{tags, HashFunction, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Clone)]
pub struct InnerProduct {
    x: PointQuery,
    y: PointQuery,
    top: usize,
}

/// One retained entry of a top list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopEntry {
    pub index: u64,
    pub hashed: u64,
    pub value: u64,
}

impl InnerProduct {
    /// `cfg.m` bounds the total insertions over both sides.
    pub fn new(cfg: PointQueryConfig, seed: &Seed, word_bits: u32) -> Result<Self> {
        let hash = HashFunction::sample(cfg.hash_spec()?, &mut seed.rng_for(tags::HASH, 0));
        Ok(InnerProduct {
            x: PointQuery::with_hash(cfg, hash.clone(), word_bits)?,
            y: PointQuery::with_hash(cfg, hash, word_bits)?,
            top: cfg.capacity()?,
        })
    }

    pub fn side(&self, side: Side) -> &PointQuery {
        match side {
            Side::X => &self.x,
            Side::Y => &self.y,
        }
    }

    /// Combined peak of both summaries, counting the shared hash once, plus
    /// the two top lists of the finishing phase.
    pub fn peak_words(&self) -> u64 {
        self.x.meter().peak_words() + self.y.meter().peak_words() - 2 + 6 * self.top as u64
    }

    pub fn update(&mut self, side: Side, i: u64, delta: i64) -> Result<()> {
        if delta < 0 {
            return Err(Error::ModelViolation(format!("negative delta {delta} in an insertion-only stream")));
        }
        let target = match side {
            Side::X => &mut self.x,
            Side::Y => &mut self.y,
        };
        if delta == 0 {
            // still range-check the index
            return target.query(i).map(drop);
        }
        target.update_weighted(i, delta as u64)
    }

    /// Top `ceil(1/ε)` nonzero answers of one side, by value descending then
    /// hashed id ascending.
    pub fn top_list(&self, side: Side) -> Vec<TopEntry> {
        let mut all: Vec<TopEntry> = self
            .side(side)
            .hashed_answers()
            .into_iter()
            .map(|(index, hashed, value)| TopEntry { index, hashed, value })
            .collect();
        all.sort_by(|a, b| b.value.cmp(&a.value).then(a.hashed.cmp(&b.hashed)).then(a.index.cmp(&b.index)));
        all.truncate(self.top);
        all
    }

    /// `Σ x'·y'` over hashed ids retained on both sides, or a collision error
    /// when two retained indices share a hashed id.
    pub fn estimate(&self) -> Result<u128> {
        let mut lists = Vec::with_capacity(2);
        for side in [Side::X, Side::Y] {
            let mut by_id: BTreeMap<u64, TopEntry> = BTreeMap::new();
            for e in self.top_list(side) {
                if let Some(prev) = by_id.insert(e.hashed, e) {
                    return Err(Error::Collision { hashed: e.hashed, first: prev.index, second: e.index });
                }
            }
            lists.push(by_id);
        }
        for (id, ex) in &lists[0] {
            if let Some(ey) = lists[1].get(id) {
                if ex.index != ey.index {
                    return Err(Error::Collision { hashed: *id, first: ex.index, second: ey.index });
                }
            }
        }
        Ok(lists[0].iter().filter_map(|(id, ex)| lists[1].get(id).map(|ey| ex.value as u128 * ey.value as u128)).sum())
    }
}
