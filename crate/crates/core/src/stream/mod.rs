//! Stream data model: element streams, turnstile vector and matrix updates,
//! a strict line-oriented text format, seeded generators, multi-pass replay
//! and the space meter.
//!
//! Indices are 1-based throughout, so an element stream over `[n]` carries
//! values in `1..=n` and matrix coordinates are `(i, j) ∈ [n] × [d]`.

mod generate;
mod meter;
mod text;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use generate::{GeneratorKind, GeneratorSpec};
pub use meter::SpaceMeter;
pub use text::{parse_stream, serialize_stream};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Element,
    TurnstileVector,
    TurnstileMatrix,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::Element => "elem",
            Model::TurnstileVector => "vec",
            Model::TurnstileMatrix => "mat",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Header {
    pub model: Model,
    pub n: u64,
    /// Column count; 1 for element and vector streams.
    pub d: u64,
    /// Number of records.
    pub m: u64,
}

impl Header {
    /// Bits per machine word: `ceil(log2 max(n, m, d))`, at least 1.
    pub fn word_bits(&self) -> u32 {
        crate::randomness::field::ceil_log2(self.n.max(self.m).max(self.d)).max(1)
    }

    /// Magnitude bound on every running entry: `n^3`.
    pub fn entry_bound(&self) -> i128 {
        (self.n as i128).pow(3)
    }
}

/// One turnstile update. Vector streams use `col == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TurnstileUpdate {
    pub row: u64,
    pub col: u64,
    pub delta: i64,
}

impl TurnstileUpdate {
    pub fn vector(row: u64, delta: i64) -> Self {
        TurnstileUpdate { row, col: 1, delta }
    }

    pub fn matrix(row: u64, col: u64, delta: i64) -> Self {
        TurnstileUpdate { row, col, delta }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Body {
    Elements(Vec<u64>),
    Updates(Vec<TurnstileUpdate>),
}

/// A validated, immutable, replayable stream.
///
/// Clones share the body and the pass counter.
#[derive(Debug, Clone)]
pub struct StreamSource {
    header: Header,
    body: Arc<Body>,
    passes: Arc<AtomicU64>,
}

impl PartialEq for StreamSource {
    fn eq(&self, other: &Self) -> bool {
        self.header == other.header && self.body == other.body
    }
}

impl Eq for StreamSource {}

impl StreamSource {
    pub fn elements(n: u64, elements: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("universe size must be positive".into()));
        }
        if let Some(&e) = elements.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::Domain(format!("element {e} outside [1, {n}]")));
        }
        let header = Header { model: Model::Element, n, d: 1, m: elements.len() as u64 };
        Ok(Self::from_parts(header, Body::Elements(elements)))
    }

    pub fn vector(n: u64, updates: Vec<TurnstileUpdate>) -> Result<Self> {
        Self::turnstile(Model::TurnstileVector, n, 1, updates)
    }

    pub fn matrix(n: u64, d: u64, updates: Vec<TurnstileUpdate>) -> Result<Self> {
        Self::turnstile(Model::TurnstileMatrix, n, d, updates)
    }

    fn turnstile(model: Model, n: u64, d: u64, updates: Vec<TurnstileUpdate>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidSpec("dimensions must be positive".into()));
        }
        let header = Header { model, n, d, m: updates.len() as u64 };
        let mut checker = EntryChecker::new(&header);
        for u in &updates {
            checker.apply(u)?;
        }
        Ok(Self::from_parts(header, Body::Updates(updates)))
    }

    fn from_parts(header: Header, body: Body) -> Self {
        StreamSource { header, body: Arc::new(body), passes: Arc::new(AtomicU64::new(0)) }
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn model(&self) -> Model {
        self.header.model
    }

    pub fn len(&self) -> usize {
        self.header.m as usize
    }

    pub fn is_empty(&self) -> bool {
        self.header.m == 0
    }

    /// Number of replays handed out so far.
    pub fn pass_count(&self) -> u64 {
        self.passes.load(Ordering::SeqCst)
    }

    /// A fresh pass over an element stream.
    pub fn replay_elements(&self) -> Result<std::iter::Copied<std::slice::Iter<'_, u64>>> {
        match &*self.body {
            Body::Elements(e) => {
                self.passes.fetch_add(1, Ordering::SeqCst);
                Ok(e.iter().copied())
            }
            Body::Updates(_) => {
                Err(Error::ModelViolation(format!("expected an element stream, found {}", self.header.model)))
            }
        }
    }

    /// A fresh pass over a turnstile stream.
    pub fn replay_updates(&self) -> Result<std::iter::Copied<std::slice::Iter<'_, TurnstileUpdate>>> {
        match &*self.body {
            Body::Updates(u) => {
                self.passes.fetch_add(1, Ordering::SeqCst);
                Ok(u.iter().copied())
            }
            Body::Elements(_) => Err(Error::ModelViolation("expected a turnstile stream, found elem".into())),
        }
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        serialize_stream(self)
    }

    /// Final vector of a vector stream, or final row-major matrix of a matrix
    /// stream. Element streams materialize as their frequency vector.
    pub fn materialize(&self) -> Vec<i128> {
        let h = self.header;
        let mut out = vec![0i128; (h.n * h.d) as usize];
        match &*self.body {
            Body::Elements(e) => e.iter().for_each(|&v| out[(v - 1) as usize] += 1),
            Body::Updates(u) => {
                u.iter().for_each(|x| out[((x.row - 1) * h.d + (x.col - 1)) as usize] += x.delta as i128)
            }
        }
        out
    }
}

/// Tracks running entries to enforce coordinate ranges and the `n^3` bound.
pub(crate) struct EntryChecker {
    header: Header,
    bound: i128,
    entries: HashMap<(u64, u64), i128>,
}

impl EntryChecker {
    pub(crate) fn new(header: &Header) -> Self {
        EntryChecker { header: *header, bound: header.entry_bound(), entries: HashMap::new() }
    }

    pub(crate) fn apply(&mut self, u: &TurnstileUpdate) -> Result<()> {
        let h = &self.header;
        if u.row == 0 || u.row > h.n {
            return Err(Error::Domain(format!("row {} outside [1, {}]", u.row, h.n)));
        }
        if u.col == 0 || u.col > h.d {
            return Err(Error::Domain(format!("column {} outside [1, {}]", u.col, h.d)));
        }
        let e = self.entries.entry((u.row, u.col)).or_insert(0);
        let next = *e + u.delta as i128;
        if next.abs() > self.bound {
            return Err(Error::Domain(format!(
                "entry ({}, {}) reaches {next}, beyond the bound {}",
                u.row, u.col, self.bound
            )));
        }
        *e = next;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replays_identical_and_counted() {
        let s = StreamSource::elements(4, vec![1, 2, 3, 4, 4, 3]).unwrap();
        let a: Vec<_> = s.replay_elements().unwrap().collect();
        let b: Vec<_> = s.replay_elements().unwrap().collect();
        assert_eq!(a, b);
        assert_eq!(s.pass_count(), 2);
        let c: Vec<_> = s.replay_elements().unwrap().collect();
        assert_eq!(a, c);
        assert_eq!(s.pass_count(), 3);
    }

    #[test]
    fn interleaved_iterators_do_not_interfere() {
        let s = StreamSource::elements(6, vec![6, 5, 4, 3, 2, 1]).unwrap();
        let mut x = s.replay_elements().unwrap();
        let mut y = s.replay_elements().unwrap();
        let mut tx = Vec::new();
        let mut ty = Vec::new();
        for _ in 0..6 {
            tx.push(x.next().unwrap());
            ty.push(y.next().unwrap());
            ty.push(y.next().unwrap_or(0));
            if ty.len() >= 6 {
                break;
            }
        }
        tx.extend(x);
        ty.truncate(6);
        assert_eq!(tx, vec![6, 5, 4, 3, 2, 1]);
        assert_eq!(ty, vec![6, 5, 4, 3, 2, 1]);
    }

    #[test]
    fn entry_bound_enforced() {
        // n = 2: bound 8
        let ok = StreamSource::vector(2, vec![TurnstileUpdate::vector(1, 8)]);
        assert!(ok.is_ok());
        let bad = StreamSource::vector(2, vec![TurnstileUpdate::vector(1, 5), TurnstileUpdate::vector(1, 4)]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        let bad = StreamSource::matrix(3, 2, vec![TurnstileUpdate::matrix(1, 3, 1)]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        assert!(matches!(StreamSource::elements(3, vec![4]), Err(Error::Domain(_))));
    }

    #[test]
    fn wrong_model_replay_rejected() {
        let s = StreamSource::elements(2, vec![1]).unwrap();
        assert!(s.replay_updates().is_err());
        assert_eq!(s.pass_count(), 0);
    }
}
