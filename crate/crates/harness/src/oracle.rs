//! Brute-force reference answers computed by direct materialization.
//!
//! Nothing here calls into the sketch or linear-algebra code of the library;
//! the row-space oracle carries its own exact Gauss–Jordan elimination.

use std::collections::{BTreeMap, BTreeSet};

use anyhow::{bail, ensure, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use pd_sketch::stream::{Model, StreamSource};

use crate::registry::{decode_answers, decode_basis, Configured};

/// Largest `n * d` materialized densely.
pub const MAX_DENSE_ENTRIES: u64 = 1 << 22;
/// Largest matrix handed to the exact elimination.
pub const MAX_EXACT_ENTRIES: u64 = 1 << 14;
/// Largest stream replayed for element statistics.
pub const MAX_RECORDS: u64 = 1 << 26;

fn records(stream: &StreamSource) -> Result<()> {
    ensure!(
        stream.header().m <= MAX_RECORDS,
        "stream of {} records exceeds the oracle cap {MAX_RECORDS}",
        stream.header().m
    );
    Ok(())
}

/// Exact element frequencies of an element stream.
pub fn frequencies(stream: &StreamSource) -> Result<BTreeMap<u64, u64>> {
    records(stream)?;
    let mut f = BTreeMap::new();
    for e in stream.replay_elements()? {
        *f.entry(e).or_insert(0) += 1;
    }
    Ok(f)
}

/// Elements occurring at least twice.
pub fn duplicates(stream: &StreamSource) -> Result<BTreeSet<u64>> {
    Ok(frequencies(stream)?.into_iter().filter(|&(_, c)| c >= 2).map(|(e, _)| e).collect())
}

/// Sparse final entries `(row, col) -> value` of a turnstile stream.
pub fn entries(stream: &StreamSource) -> Result<BTreeMap<(u64, u64), i128>> {
    records(stream)?;
    let mut a: BTreeMap<(u64, u64), i128> = BTreeMap::new();
    for u in stream.replay_updates()? {
        *a.entry((u.row, u.col)).or_insert(0) += u.delta as i128;
    }
    a.retain(|_, v| *v != 0);
    Ok(a)
}

/// Dense row-major final matrix.
pub fn dense(stream: &StreamSource) -> Result<Vec<Vec<i128>>> {
    let h = stream.header();
    ensure!(h.n * h.d <= MAX_DENSE_ENTRIES, "{}x{} matrix exceeds the dense oracle cap", h.n, h.d);
    let mut a = vec![vec![0i128; h.d as usize]; h.n as usize];
    for ((i, j), v) in entries(stream)? {
        a[(i - 1) as usize][(j - 1) as usize] = v;
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerProductTruth {
    pub value: i128,
    pub l1_x: u128,
    pub l1_y: u128,
}

/// `⟨x, y⟩` and the ℓ1 norms for an `n × 2` matrix stream with `x`, `y` as
/// its columns.
pub fn inner_product(stream: &StreamSource) -> Result<InnerProductTruth> {
    ensure!(stream.header().d == 2, "inner product needs two columns");
    let mut x = BTreeMap::new();
    let mut y = BTreeMap::new();
    for ((i, j), v) in entries(stream)? {
        if j == 1 {
            x.insert(i, v)
        } else {
            y.insert(i, v)
        };
    }
    let value = x.iter().filter_map(|(i, a)| y.get(i).map(|b| a * b)).sum();
    let l1 = |m: &BTreeMap<u64, i128>| m.values().map(|v| v.unsigned_abs()).sum();
    Ok(InnerProductTruth { value, l1_x: l1(&x), l1_y: l1(&y) })
}

/// Exact `‖v‖²` of a vector stream.
pub fn l2_squared(stream: &StreamSource) -> Result<u128> {
    Ok(entries(stream)?.values().map(|v| v.unsigned_abs().pow(2)).sum())
}

/// Rows with at least one nonzero entry.
pub fn nonzero_rows(stream: &StreamSource) -> Result<BTreeSet<u64>> {
    Ok(entries(stream)?.keys().map(|&(i, _)| i).collect())
}

pub fn smallest_nonzero_row(stream: &StreamSource) -> Result<Option<u64>> {
    Ok(nonzero_rows(stream)?.into_iter().next())
}

/// Exact reduced row echelon form; zero rows dropped.
pub fn rref(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    a
}

fn rational(v: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Canonical exact basis of the row space of a matrix stream.
pub fn row_space(stream: &StreamSource) -> Result<Vec<Vec<BigRational>>> {
    let h = stream.header();
    ensure!(h.model == Model::TurnstileMatrix, "row space needs a matrix stream");
    ensure!(h.n * h.d <= MAX_EXACT_ENTRIES, "{}x{} matrix exceeds the exact oracle cap", h.n, h.d);
    let a = dense(stream)?;
    let rows: Vec<Vec<BigRational>> =
        a.iter().filter(|r| r.iter().any(|v| *v != 0)).map(|r| r.iter().map(|&v| rational(v)).collect()).collect();
    Ok(rref(&rows))
}

fn invert(m: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let k = m.len();
    let aug: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let red = rref(&aug);
    if red.len() < k || (0..k).any(|i| !red[i][i].is_one()) {
        bail!("singular Gram matrix");
    }
    Ok(red.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// Orthogonal projection `Bᵀ (B Bᵀ)⁻¹ B` onto the span of the rows of `b`.
/// `d` is the ambient dimension, needed when `b` is empty.
pub fn projection(b: &[Vec<BigRational>], d: usize) -> Result<Vec<Vec<BigRational>>> {
    if b.is_empty() {
        return Ok(vec![vec![BigRational::zero(); d]; d]);
    }
    let k = b.len();
    let dot =
        |x: &[BigRational], y: &[BigRational]| x.iter().zip(y).fold(BigRational::zero(), |acc, (p, q)| acc + p * q);
    let gram: Vec<Vec<BigRational>> = (0..k).map(|i| (0..k).map(|j| dot(&b[i], &b[j])).collect()).collect();
    let g = invert(&gram)?;
    // C = G⁻¹ B, then P = Bᵀ C
    let c: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..d).map(|j| (0..k).fold(BigRational::zero(), |acc, t| acc + &g[i][t] * &b[t][j])).collect())
        .collect();
    Ok((0..d)
        .map(|i| (0..d).map(|j| (0..k).fold(BigRational::zero(), |acc, t| acc + &b[t][i] * &c[t][j])).collect())
        .collect())
}

pub fn to_f64(m: &[Vec<BigRational>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()).collect()
}

/// Entrywise max distance between two equally shaped matrices, or infinity
/// when the shapes differ.
pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return f64::INFINITY;
    }
    a.iter().zip(b).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
}

/// Tolerance for comparing a printed basis against the exact one; covers the
/// nine-decimal rounding of the canonical string.
pub const PRINTED_BASIS_TOL: f64 = 1e-6;

/// Per-output validity predicate for an algorithm on a fixed stream.
pub struct Validator {
    inner: Box<dyn Fn(&str) -> bool + Send + Sync>,
}

impl Validator {
    pub fn is_valid(&self, output: &str) -> bool {
        (self.inner)(output)
    }

    pub fn for_algorithm(alg: &Configured, stream: &StreamSource) -> Result<Self> {
        let inner: Box<dyn Fn(&str) -> bool + Send + Sync> = match *alg {
            Configured::DupConc { .. } | Configured::DupMultipass { .. } => {
                let dups = duplicates(stream)?;
                Box::new(move |o| o.parse::<u64>().is_ok_and(|e| dups.contains(&e)))
            }
            Configured::NonzeroRowPd | Configured::NonzeroRowRand => {
                let rows = nonzero_rows(stream)?;
                Box::new(move |o| o.parse::<u64>().is_ok_and(|r| rows.contains(&r)))
            }
            Configured::PointQuery { eps } => {
                let f = frequencies(stream)?;
                let slack = eps * stream.header().m as f64;
                Box::new(move |o| {
                    let Ok(ans) = decode_answers(o) else { return false };
                    let keys: BTreeSet<u64> = f.keys().chain(ans.keys()).copied().collect();
                    keys.iter().all(|i| {
                        let (est, truth) = (ans.get(i).copied().unwrap_or(0), f.get(i).copied().unwrap_or(0));
                        (est as f64 - truth as f64).abs() <= slack
                    })
                })
            }
            Configured::InnerProduct { eps } => {
                let t = inner_product(stream)?;
                let slack = eps * t.l1_x as f64 * t.l1_y as f64;
                Box::new(move |o| o.parse::<i128>().is_ok_and(|v| ((v - t.value) as f64).abs() <= slack))
            }
            Configured::L2Trunc { eps, .. } => {
                let norm = (l2_squared(stream)? as f64).sqrt();
                Box::new(move |o| {
                    o.parse::<f64>().is_ok_and(|v| {
                        if norm == 0.0 {
                            v == 0.0
                        } else {
                            v >= norm / (1.0 + eps) && v <= norm * (1.0 + eps)
                        }
                    })
                })
            }
            Configured::RecoverBasis { .. } => {
                let exact = to_f64(&row_space(stream)?);
                Box::new(move |o| decode_basis(o).is_ok_and(|b| max_abs_diff(&b, &exact) <= PRINTED_BASIS_TOL))
            }
        };
        Ok(Validator { inner })
    }
}
