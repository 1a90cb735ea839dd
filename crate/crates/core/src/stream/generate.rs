//! Seeded synthetic instances. Every generator is a pure function of its
//! spec and the seed.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{StreamSource, TurnstileUpdate};
use crate::error::{Error, Result};
use crate::linalg::exact_rank_i128;
use crate::randomness::{tags, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `m` copies of the element 1.
    AllOnes,
    /// `3n/4` distinct values, each exactly twice, in random order.
    PairedDuplicates,
    /// `m` elements drawn uniformly from a random pool of `k` values.
    RandomDuplicateStream,
    /// `m` nonzero updates in `[-4, 4]` spread over `k` random coordinates.
    RandomTurnstileVector,
    /// An `n × d` integer matrix of rank exactly `min(k, n, d)`, one update per
    /// nonzero entry in row-major order.
    RandomLowRankMatrix,
    /// Two insertion-only vectors as the columns of an `n × 2` matrix, each
    /// with support `k` (about half of it shared) and `m/2` unit insertions.
    RandomSparsePair,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::AllOnes,
        GeneratorKind::PairedDuplicates,
        GeneratorKind::RandomDuplicateStream,
        GeneratorKind::RandomTurnstileVector,
        GeneratorKind::RandomLowRankMatrix,
        GeneratorKind::RandomSparsePair,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GeneratorKind::AllOnes => "all-ones",
            GeneratorKind::PairedDuplicates => "paired-duplicates",
            GeneratorKind::RandomDuplicateStream => "random-duplicate-stream",
            GeneratorKind::RandomTurnstileVector => "random-turnstile-vector",
            GeneratorKind::RandomLowRankMatrix => "random-low-rank-matrix",
            GeneratorKind::RandomSparsePair => "random-sparse-pair",
        }
    }

    fn accepts(self, key: &str) -> bool {
        match self {
            GeneratorKind::AllOnes | GeneratorKind::PairedDuplicates => matches!(key, "n" | "m"),
            GeneratorKind::RandomLowRankMatrix => matches!(key, "n" | "d" | "k"),
            _ => matches!(key, "n" | "m" | "k"),
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown generator {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: u64,
    pub m: Option<u64>,
    pub d: Option<u64>,
    pub k: Option<u64>,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: u64) -> Self {
        GeneratorSpec { kind, n, m: None, d: None, k: None }
    }

    pub fn with_m(mut self, m: u64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_d(mut self, d: u64) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn generate(&self, seed: &Seed) -> Result<StreamSource> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        let mut rng = seed.rng_for(tags::GENERATOR, 0);
        let default_m = (3 * n / 2).max(1);
        match self.kind {
            GeneratorKind::AllOnes => StreamSource::elements(n, vec![1; self.m.unwrap_or(default_m) as usize]),
            GeneratorKind::PairedDuplicates => {
                if !n.is_multiple_of(4) {
                    return Err(Error::InvalidSpec(format!("paired-duplicates needs 4 | n, got n = {n}")));
                }
                if self.m.is_some_and(|m| m != 3 * n / 2) {
                    return Err(Error::InvalidSpec("paired-duplicates has m = 3n/2".into()));
                }
                let mut out: Vec<u64> = index::sample(&mut rng, n as usize, (3 * n / 4) as usize)
                    .into_iter()
                    .flat_map(|v| [v as u64 + 1; 2])
                    .collect();
                out.shuffle(&mut rng);
                StreamSource::elements(n, out)
            }
            GeneratorKind::RandomDuplicateStream => {
                let pool = self.pool(&mut rng)?;
                let m = self.m.unwrap_or(default_m);
                StreamSource::elements(n, (0..m).map(|_| pool[rng.random_range(0..pool.len())]).collect())
            }
            GeneratorKind::RandomTurnstileVector => {
                let pool = self.pool(&mut rng)?;
                let m = self.m.unwrap_or(2 * n);
                let bound = (n as i128).pow(3);
                let mut value = vec![0i128; n as usize + 1];
                let mut out = Vec::with_capacity(m as usize);
                for _ in 0..m {
                    let i = pool[rng.random_range(0..pool.len())];
                    let mut delta: i64 = rng.random_range(1..=4);
                    if rng.random_bool(0.5) {
                        delta = -delta;
                    }
                    let cur = &mut value[i as usize];
                    if (*cur + delta as i128).abs() > bound {
                        delta = -delta;
                    }
                    if (*cur + delta as i128).abs() > bound {
                        delta = -cur.signum() as i64;
                    }
                    *cur += delta as i128;
                    out.push(TurnstileUpdate::vector(i, delta));
                }
                StreamSource::vector(n, out)
            }
            GeneratorKind::RandomLowRankMatrix => {
                let d = self.d.unwrap_or(n);
                let k = self.k.unwrap_or(2);
                low_rank(n, d, k, &mut rng)
            }
            GeneratorKind::RandomSparsePair => {
                let k = self.k.unwrap_or(5);
                let m = self.m.unwrap_or(40);
                sparse_pair(n, m, k, &mut rng)
            }
        }
    }

    fn pool<R: Rng>(&self, rng: &mut R) -> Result<Vec<u64>> {
        let k = self.k.unwrap_or(self.n);
        if k == 0 || k > self.n {
            return Err(Error::InvalidSpec(format!("pool size k = {k} outside [1, {}]", self.n)));
        }
        let mut p: Vec<u64> =
            index::sample(rng, self.n as usize, k as usize).into_iter().map(|v| v as u64 + 1).collect();
        p.sort_unstable();
        Ok(p)
    }
}

fn low_rank<R: Rng>(n: u64, d: u64, k: u64, rng: &mut R) -> Result<StreamSource> {
    let target = k.min(n).min(d) as usize;
    let bound = (n as i128).pow(3);
    // factor entries in [-r, r] keep every product entry within n^3
    let mut r: i64 = 3;
    while r > 1 && (k as i128) * (r as i128).pow(2) > bound {
        r -= 1;
    }
    if (k as i128) > bound && k > 0 {
        return Err(Error::InvalidSpec(format!("rank {k} cannot fit entries within n^3 = {bound}")));
    }
    let (nu, du, ku) = (n as usize, d as usize, k as usize);
    for _ in 0..1000 {
        let b: Vec<i64> = (0..nu * ku).map(|_| rng.random_range(-r..=r)).collect();
        let c: Vec<i64> = (0..ku * du).map(|_| rng.random_range(-r..=r)).collect();
        let mut a = vec![0i128; nu * du];
        for i in 0..nu {
            for t in 0..ku {
                let bt = b[i * ku + t] as i128;
                if bt != 0 {
                    for j in 0..du {
                        a[i * du + j] += bt * c[t * du + j] as i128;
                    }
                }
            }
        }
        if exact_rank_i128(&a, nu, du) != target {
            continue;
        }
        let updates = a
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(idx, &v)| TurnstileUpdate::matrix((idx / du) as u64 + 1, (idx % du) as u64 + 1, v as i64))
            .collect();
        return StreamSource::matrix(n, d, updates);
    }
    Err(Error::InvalidSpec(format!("failed to draw a rank-{target} matrix")))
}

fn sparse_pair<R: Rng>(n: u64, m: u64, k: u64, rng: &mut R) -> Result<StreamSource> {
    let half = m / 2;
    if k == 0 || half < k || 2 * k > n {
        return Err(Error::InvalidSpec(format!(
            "sparse pair needs 1 <= k, k <= m/2 and 2k <= n (k = {k}, m = {m}, n = {n})"
        )));
    }
    let ids: Vec<u64> = index::sample(rng, n as usize, (2 * k) as usize).into_iter().map(|v| v as u64 + 1).collect();
    let shared = k.div_ceil(2) as usize;
    let xs = &ids[..k as usize];
    let ys: Vec<u64> = ids[..shared].iter().chain(&ids[k as usize..(2 * k) as usize - shared]).copied().collect();
    let mut out = Vec::with_capacity(2 * half as usize);
    for (col, support) in [(1u64, xs), (2u64, &ys[..])] {
        for t in 0..half {
            let i = if (t as usize) < support.len() {
                support[t as usize]
            } else {
                support[rng.random_range(0..support.len())]
            };
            out.push(TurnstileUpdate::matrix(i, col, 1));
        }
    }
    out.shuffle(rng);
    StreamSource::matrix(n, 2, out)
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:n={}", self.kind.id(), self.n)?;
        for (key, v) in [("m", self.m), ("d", self.d), ("k", self.k)] {
            if let Some(v) = v {
                write!(f, ",{key}={v}")?;
            }
        }
        Ok(())
    }
}

/// `<kind>:n=..,m=..,d=..,k=..`
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let kind: GeneratorKind = kind.parse()?;
        let mut spec = GeneratorSpec::new(kind, 0);
        let mut have_n = false;
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (key, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("generator parameter {kv:?} is not key=value")))?;
            if !kind.accepts(key) {
                return Err(Error::InvalidSpec(format!("{} does not take parameter {key:?}", kind.id())));
            }
            let v: u64 = v.parse().map_err(|_| Error::InvalidSpec(format!("bad value in {kv:?}")))?;
            match key {
                "n" => {
                    spec.n = v;
                    have_n = true;
                }
                "m" => spec.m = Some(v),
                "d" => spec.d = Some(v),
                _ => spec.k = Some(v),
            }
        }
        if !have_n {
            return Err(Error::InvalidSpec(format!("generator {s:?} needs n")));
        }
        Ok(spec)
    }
}
