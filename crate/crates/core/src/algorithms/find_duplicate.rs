//! Find-Duplicate: given `m = 3n/2` elements of `[n]`, report an element that
//! occurs at least twice.
//!
//! [`ConcentratedDuplicate`] is zero-error and randomized: each copy remembers
//! the element at a random position and reports it if it reappears; the
//! minimum report wins. [`multipass_find_duplicate`] is deterministic and
//! narrows an interval by pigeonhole counting, one pass per level.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::randomness::field::ceil_log2;
use crate::randomness::{tags, Seed};
use crate::stream::{SpaceMeter, StreamSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuplicateSampler {
    pub target: u64,
    pub remembered: Option<u64>,
    pub seen_again: bool,
}

impl DuplicateSampler {
    pub fn output(&self) -> Option<u64> {
        if self.seen_again {
            self.remembered
        } else {
            None
        }
    }
}

/// `s * ceil(log2 n)` independent duplicate samplers.
#[derive(Debug, Clone)]
pub struct ConcentratedDuplicate {
    length: u64,
    position: u64,
    copies: Vec<DuplicateSampler>,
    /// target position -> copies aiming at it
    by_target: BTreeMap<u64, Vec<usize>>,
    /// remembered element -> copies still waiting for it
    waiting: HashMap<u64, Vec<usize>>,
    meter: SpaceMeter,
}

impl ConcentratedDuplicate {
    pub fn copies_for(n: u64, s: u64) -> u64 {
        s * ceil_log2(n).max(1) as u64
    }

    pub fn new(n: u64, s: u64, seed: &Seed, word_bits: u32) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!("Find-Duplicate needs an even n >= 2, got {n}")));
        }
        if s == 0 {
            return Err(Error::InvalidSpec("s must be positive".into()));
        }
        Self::with_copies(n, Self::copies_for(n, s), seed, word_bits)
    }

    /// An explicit number of copies with uniform targets.
    pub fn with_copies(n: u64, copies: u64, seed: &Seed, word_bits: u32) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) || copies == 0 {
            return Err(Error::InvalidSpec(format!(
                "need an even n >= 2 and at least one copy, got n = {n}, copies = {copies}"
            )));
        }
        let length = 3 * n / 2;
        let mut rng = seed.rng_for(tags::DUP_TARGET, 0);
        let targets = (0..copies).map(|_| rng.random_range(1..=length)).collect();
        Self::with_targets(n, targets, word_bits)
    }

    /// Copies with fixed target positions in `[1, 3n/2]`.
    pub fn with_targets(n: u64, targets: Vec<u64>, word_bits: u32) -> Result<Self> {
        let length = 3 * n / 2;
        if let Some(t) = targets.iter().find(|&&t| t == 0 || t > length) {
            return Err(Error::InvalidSpec(format!("target {t} outside [1, {length}]")));
        }
        let mut by_target: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (c, &t) in targets.iter().enumerate() {
            by_target.entry(t).or_default().push(c);
        }
        let copies = targets
            .into_iter()
            .map(|target| DuplicateSampler { target, remembered: None, seen_again: false })
            .collect::<Vec<_>>();
        let mut meter = SpaceMeter::new(word_bits);
        // target, remembered element and flag per copy, plus the position
        meter.charge(3 * copies.len() as i64 + 1)?;
        Ok(ConcentratedDuplicate { length, position: 0, copies, by_target, waiting: HashMap::new(), meter })
    }

    pub fn copies(&self) -> &[DuplicateSampler] {
        &self.copies
    }

    pub fn meter(&self) -> &SpaceMeter {
        &self.meter
    }

    pub fn update(&mut self, element: u64) -> Result<()> {
        if self.position == self.length {
            return Err(Error::ModelViolation(format!("stream exceeds 3n/2 = {} elements", self.length)));
        }
        self.position += 1;
        if let Some(waiting) = self.waiting.remove(&element) {
            for c in waiting {
                self.copies[c].seen_again = true;
            }
        }
        if let Some(cs) = self.by_target.get(&self.position) {
            for &c in cs {
                self.copies[c].remembered = Some(element);
                self.waiting.entry(element).or_default().push(c);
            }
        }
        Ok(())
    }

    /// Minimum over the copies that saw their element twice, else `None`.
    pub fn output(&self) -> Option<u64> {
        self.copies.iter().filter_map(DuplicateSampler::output).min()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipassOutcome {
    pub element: u64,
    pub passes_used: u32,
    pub peak_words: u64,
}

/// Smallest `b` with `b^p >= n`.
pub fn branching(n: u64, p: u32) -> u64 {
    let fits = |b: u64| (b as u128).checked_pow(p).is_none_or(|v| v >= n as u128);
    let mut lo = 1u64;
    let mut hi = n.max(1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Deterministic `p`-pass search. Each pass splits the live interval of
/// length `L` into subintervals of width `ceil(L / b)`, `b = ceil(n^(1/p))`,
/// counts the stream inside each, and keeps the lowest one whose count
/// exceeds its width.
pub fn multipass_find_duplicate(source: &StreamSource, passes: u32) -> Result<MultipassOutcome> {
    let h = source.header();
    if passes == 0 {
        return Err(Error::InvalidSpec("at least one pass is required".into()));
    }
    if h.m <= h.n {
        return Err(Error::Precondition(format!("m = {} <= n = {} does not force a duplicate", h.m, h.n)));
    }
    let b = branching(h.n, passes);
    let mut meter = SpaceMeter::new(h.word_bits());
    // current interval endpoints
    meter.charge(2)?;
    let (mut lo, mut hi) = (1u64, h.n);
    let mut used = 0;
    while lo < hi {
        if used == passes {
            return Err(Error::Precondition(format!("{passes} passes did not isolate an element")));
        }
        let len = hi - lo + 1;
        let width = len.div_ceil(b);
        let parts = len.div_ceil(width) as usize;
        meter.charge(parts as i64)?;
        let mut counts = vec![0u64; parts];
        for e in source.replay_elements()? {
            if (lo..=hi).contains(&e) {
                counts[((e - lo) / width) as usize] += 1;
            }
        }
        used += 1;
        let pick = (0..parts).find(|&t| {
            let start = lo + t as u64 * width;
            let size = width.min(hi - start + 1);
            counts[t] > size
        });
        let Some(t) = pick else {
            return Err(Error::Precondition("no subinterval exceeds its width; the input has no duplicate".into()));
        };
        let start = lo + t as u64 * width;
        (lo, hi) = (start, (start + width - 1).min(hi));
        meter.charge(-(parts as i64))?;
    }
    Ok(MultipassOutcome { element: lo, passes_used: used, peak_words: meter.peak_words() })
}
