use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Canonical output string -> number of trials that produced it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDistribution {
    counts: BTreeMap<String, u64>,
    trials: u64,
}

impl OutputDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let trials = counts.values().sum();
        OutputDistribution { counts, trials }
    }

    pub fn record(&mut self, output: impl Into<String>) {
        *self.counts.entry(output.into()).or_insert(0) += 1;
        self.trials += 1;
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, output: &str) -> u64 {
        self.counts.get(output).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Outputs by count descending, ties by output ascending.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(k, &c)| (k.as_str(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        v
    }

    pub fn modal(&self) -> Option<(&str, u64)> {
        self.ranked().into_iter().next()
    }

    pub fn modal_probability(&self) -> f64 {
        self.modal().map_or(0.0, |(_, c)| c as f64 / self.trials as f64)
    }

    /// Combined count of the `k` most frequent outputs.
    pub fn top_k_count(&self, k: usize) -> u64 {
        self.ranked().into_iter().take(k).map(|(_, c)| c).sum()
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        let t = self.trials as f64;
        self.counts
            .values()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / t;
                -p * p.log2()
            })
            .sum::<f64>()
            .max(0.0)
    }

    /// Fewest outputs whose combined mass reaches `q`.
    pub fn min_cover(&self, q: f64) -> usize {
        let need = q * self.trials as f64;
        let mut acc = 0u64;
        for (k, (_, c)) in self.ranked().into_iter().enumerate() {
            if acc as f64 >= need {
                return k;
            }
            acc += c;
        }
        self.counts.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(pairs: &[(&str, u64)]) -> OutputDistribution {
        OutputDistribution::from_counts(pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect())
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(dist(&[("a", 7)]).entropy_bits(), 0.0);
        assert!((dist(&[("a", 3), ("b", 3)]).entropy_bits() - 1.0).abs() < 1e-12);
        let eight: Vec<(String, u64)> = (0..8).map(|i| (i.to_string(), 5)).collect();
        assert!((OutputDistribution::from_counts(eight.into_iter().collect()).entropy_bits() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn modal_and_cover() {
        let d = dist(&[("a", 70), ("b", 20), ("c", 10)]);
        assert_eq!(d.modal(), Some(("a", 70)));
        assert_eq!(d.min_cover(0.5), 1);
        assert_eq!(d.min_cover(0.9), 2);
        assert_eq!(d.min_cover(0.95), 3);
        assert_eq!(d.top_k_count(2), 90);
        // ties broken by label
        assert_eq!(dist(&[("b", 1), ("a", 1)]).modal(), Some(("a", 1)));
    }

    #[test]
    fn single_trial() {
        let mut d = OutputDistribution::new();
        d.record("x");
        assert_eq!((d.trials(), d.count("x"), d.distinct()), (1, 1, 1));
    }

    proptest! {
        #[test]
        fn entropy_label_invariant(counts in prop::collection::vec(1u64..50, 1..8), shift in 0usize..8) {
            let a: BTreeMap<String, u64> = counts.iter().enumerate().map(|(i, &c)| (format!("o{i}"), c)).collect();
            let b: BTreeMap<String, u64> = counts.iter().enumerate().map(|(i, &c)| (format!("z{}", (i + shift) * 7), c)).collect();
            let (a, b) = (OutputDistribution::from_counts(a), OutputDistribution::from_counts(b));
            prop_assert!((a.entropy_bits() - b.entropy_bits()).abs() < 1e-12);
            prop_assert_eq!(a.trials(), counts.iter().sum::<u64>());
        }

        #[test]
        fn cover_monotone(counts in prop::collection::vec(1u64..50, 1..8), q1 in 0.0f64..1.0, q2 in 0.0f64..1.0) {
            let d = OutputDistribution::from_counts(counts.iter().enumerate().map(|(i, &c)| (i.to_string(), c)).collect());
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            prop_assert!(d.min_cover(lo) <= d.min_cover(hi));
        }
    }
}
