//! Weighted Misra–Gries summary.
//!
//! A new key arriving at a full summary triggers a batch decrement: every
//! stored counter and the incoming weight drop by `c = min(weight, smallest
//! counter)`, zeros are evicted, and the process repeats until the remaining
//! weight is zero or fits. The decrement never inspects keys, so the state is
//! a function of the stream up to relabeling; that is what makes the summary
//! permutation invariant.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// `ceil(1/ε)`, robust to `1/ε` landing a hair above an integer.
pub fn capacity_for(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidSpec(format!("epsilon {epsilon} outside (0, 1]")));
    }
    Ok((1.0 / epsilon - 1e-9).ceil().max(1.0) as usize)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisraGries<K: Ord> {
    capacity: usize,
    entries: BTreeMap<K, u64>,
    total: u64,
}

impl<K: Ord + Clone> MisraGries<K> {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidSpec("Misra-Gries capacity must be positive".into()));
        }
        Ok(MisraGries { capacity, entries: BTreeMap::new(), total: 0 })
    }

    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(capacity_for(epsilon)?)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total weight absorbed, the `m` of the error bound.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn insert(&mut self, key: K) {
        self.insert_weighted(key, 1);
    }

    pub fn insert_weighted(&mut self, key: K, weight: u64) {
        self.total += weight;
        if weight == 0 {
            return;
        }
        if let Some(c) = self.entries.get_mut(&key) {
            *c += weight;
            return;
        }
        let mut w = weight;
        while self.entries.len() >= self.capacity {
            let smallest = *self.entries.values().min().expect("full summary is nonempty");
            let c = smallest.min(w);
            self.entries.retain(|_, v| {
                *v -= c;
                *v > 0
            });
            w -= c;
            if w == 0 {
                return;
            }
        }
        self.entries.insert(key, w);
    }

    /// Stored count, 0 when absent. Never exceeds the true frequency and
    /// undercounts by at most `total / (capacity + 1)`.
    pub fn query(&self, key: &K) -> u64 {
        self.entries.get(key).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&K, u64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn capacity_rounding() {
        assert_eq!(capacity_for(1.0 / 3.0).unwrap(), 3);
        assert_eq!(capacity_for(0.1).unwrap(), 10);
        assert_eq!(capacity_for(0.3).unwrap(), 4);
        assert!(capacity_for(0.0).is_err());
    }

    #[test]
    fn unit_trace() {
        let mut mg = MisraGries::new(2).unwrap();
        for k in [1, 2, 3] {
            mg.insert(k);
        }
        // third key empties the summary
        assert!(mg.is_empty());
        for k in [1, 1, 2, 3, 1] {
            mg.insert(k);
        }
        assert_eq!(mg.query(&1), 2);
        assert_eq!(mg.query(&2), 0);
        assert_eq!(mg.total(), 8);
    }

    #[test]
    fn weighted_decrement_uses_minimum() {
        let mut mg = MisraGries::new(2).unwrap();
        mg.insert_weighted('a', 5);
        mg.insert_weighted('b', 2);
        mg.insert_weighted('c', 3);
        // c=2 evicts b, leaves a:3, then c:1 fits
        assert_eq!(mg.entries().collect::<Vec<_>>(), vec![(&'a', 3), (&'c', 1)]);
        mg.insert_weighted('d', 1);
        assert_eq!(mg.entries().collect::<Vec<_>>(), vec![(&'a', 2)]);
    }

    proptest! {
        #[test]
        fn error_bound(stream in prop::collection::vec((0u8..6, 1u64..4), 0..40), cap in 1usize..5) {
            let mut mg = MisraGries::new(cap).unwrap();
            let mut truth = BTreeMap::new();
            for &(k, w) in &stream {
                mg.insert_weighted(k, w);
                *truth.entry(k).or_insert(0u64) += w;
            }
            prop_assert!(mg.len() <= cap);
            for k in 0u8..6 {
                let t = truth.get(&k).copied().unwrap_or(0);
                let s = mg.query(&k);
                prop_assert!(s <= t);
                prop_assert!((t - s) * (cap as u64 + 1) <= mg.total());
            }
        }
    }
}
