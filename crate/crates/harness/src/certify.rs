//! Property certification on output distributions.
//!
//! A frequency is compared against its threshold with an exact two-sided
//! Clopper-Pearson interval at significance `1e-3`. The observed frequency
//! reaching the threshold passes; falling short while the upper bound still
//! reaches it is `Indeterminate`; otherwise the check fails.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::distribution::OutputDistribution;

pub const SIGNIFICANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
            Verdict::Indeterminate => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// Exact two-sided `1 - alpha` interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let (x, n) = (successes as f64, trials as f64);
    let lower =
        if successes == 0 { 0.0 } else { Beta::new(x, n - x + 1.0).expect("positive shape").inverse_cdf(alpha / 2.0) };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: String,
    pub verdict: Verdict,
    /// Observed mass of the certified output set.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub threshold: f64,
    /// Outputs whose mass was measured.
    pub witness: Vec<String>,
}

fn frequency_check(property: &str, count: u64, trials: u64, threshold: f64, witness: Vec<String>) -> Certificate {
    let (lower, upper) = clopper_pearson(count, trials, SIGNIFICANCE);
    let estimate = count as f64 / trials as f64;
    let verdict = if estimate >= threshold {
        Verdict::Pass
    } else if upper >= threshold {
        Verdict::Indeterminate
    } else {
        Verdict::Fail
    };
    Certificate { property: property.into(), verdict, estimate, lower, upper, threshold, witness }
}

fn top(dist: &OutputDistribution, k: usize) -> Vec<String> {
    dist.ranked().into_iter().take(k).map(|(o, _)| o.to_string()).collect()
}

/// Modal output frequency against `threshold` (2/3 by default).
pub fn check_pseudodeterministic(dist: &OutputDistribution, threshold: f64) -> Certificate {
    let c = dist.modal().map_or(0, |(_, c)| c);
    frequency_check("pd", c, dist.trials(), threshold, top(dist, 1))
}

/// Modal output frequency against `1/k`.
pub fn check_k_concentrated(dist: &OutputDistribution, k: f64) -> Certificate {
    let c = dist.modal().map_or(0, |(_, c)| c);
    frequency_check("k-conc", c, dist.trials(), 1.0 / k, top(dist, 1))
}

/// Mass of the `k` most frequent outputs against `(k+1)/(k+2)`.
pub fn check_k_pseudodeterministic(dist: &OutputDistribution, k: usize) -> Certificate {
    let threshold = (k as f64 + 1.0) / (k as f64 + 2.0);
    frequency_check("k-pd", dist.top_k_count(k), dist.trials(), threshold, top(dist, k))
}

/// Entropy at most `bound_bits`. A pure comparison with no interval.
pub fn check_entropy(dist: &OutputDistribution, bound_bits: f64) -> Certificate {
    let h = dist.entropy_bits();
    let verdict = if h <= bound_bits { Verdict::Pass } else { Verdict::Fail };
    Certificate {
        property: "entropy".into(),
        verdict,
        estimate: h,
        lower: h,
        upper: h,
        threshold: bound_bits,
        witness: Vec::new(),
    }
}

/// Outputs that are neither a "no answer" symbol nor accepted by the oracle.
pub const NO_ANSWER: [&str; 3] = ["⊥", "none", "fail"];

/// Number of trials with an invalid output.
pub fn certify_zero_error(dist: &OutputDistribution, valid: impl Fn(&str) -> bool) -> u64 {
    dist.counts().iter().filter(|(o, _)| !NO_ANSWER.contains(&o.as_str()) && !valid(o)).map(|(_, &c)| c).sum()
}

pub fn zero_error_certificate(violations: u64, trials: u64, witness: Vec<String>) -> Certificate {
    let verdict = if violations == 0 { Verdict::Pass } else { Verdict::Fail };
    let rate = violations as f64 / trials as f64;
    Certificate {
        property: "zero-error".into(),
        verdict,
        estimate: rate,
        lower: rate,
        upper: rate,
        threshold: 0.0,
        witness,
    }
}
