//! Streaming recovery of the row space of a rank-`k` matrix `A ∈ R^{n×d}`.
//!
//! The sketch `S A` uses a `rows × n` sign matrix whose row `r` is a
//! `(k + ceil(log2 n))`-wise independent hash `σ_r : [n] -> {±1}`. Sign
//! entries are recomputed per update, never stored. `finalize`
//! orthonormalizes the rows of `S A`, forms the projection `Π = QᵀQ` onto
//! their span, and returns its canonical basis.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{canonical_subspace_basis, projection_from_basis, qr_orthonormal_basis, DenseMatrix};
use crate::randomness::field::ceil_log2;
use crate::randomness::{tags, Seed, SignHash};
use crate::stream::{SpaceMeter, TurnstileUpdate};

/// Default row multiplier: `rows = ceil(c k log2 n)`.
pub const ROW_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisRecoveryConfig {
    pub n: u64,
    pub d: u64,
    pub k: usize,
    pub rows: usize,
}

impl BasisRecoveryConfig {
    pub fn new(n: u64, d: u64, k: usize) -> Self {
        Self::with_factor(n, d, k, ROW_FACTOR)
    }

    pub fn with_factor(n: u64, d: u64, k: usize, c: f64) -> Self {
        let rows = (c * k as f64 * ceil_log2(n).max(1) as f64).ceil().max(1.0) as usize;
        BasisRecoveryConfig { n, d, k, rows }
    }

    pub fn independence(&self) -> usize {
        (self.k + ceil_log2(self.n) as usize).max(2)
    }
}

#[derive(Debug, Clone)]
pub struct BasisRecovery<T> {
    cfg: BasisRecoveryConfig,
    signs: Vec<SignHash>,
    sketch: DenseMatrix<T>,
    /// signs of the most recent source row, reused across its columns
    column_cache: Option<(u64, Vec<i8>)>,
    meter: SpaceMeter,
}

impl<T: Float> BasisRecovery<T> {
    pub fn new(cfg: BasisRecoveryConfig, seed: &Seed, word_bits: u32) -> Result<Self> {
        if cfg.n == 0 || cfg.d == 0 || cfg.k == 0 || cfg.rows == 0 {
            return Err(Error::InvalidSpec("basis recovery needs positive n, d, k and rows".into()));
        }
        let t = cfg.independence();
        let signs = (0..cfg.rows as u64)
            .map(|r| SignHash::sample(cfg.n, t, &mut seed.rng_for(tags::BASIS_SIGN, r)))
            .collect::<Result<Vec<_>>>()?;
        let mut meter = SpaceMeter::new(word_bits);
        // sketch entries, hash coefficients, and the cached sign column
        meter.charge((cfg.rows * cfg.d as usize + cfg.rows * t + cfg.rows + 1) as i64)?;
        Ok(BasisRecovery {
            cfg,
            signs,
            sketch: DenseMatrix::zeros(cfg.rows, cfg.d as usize),
            column_cache: None,
            meter,
        })
    }

    pub fn config(&self) -> &BasisRecoveryConfig {
        &self.cfg
    }

    pub fn meter(&self) -> &SpaceMeter {
        &self.meter
    }

    pub fn sketch(&self) -> &DenseMatrix<T> {
        &self.sketch
    }

    /// `S[r, i]` for row `r` and source row `i ∈ [1, n]`.
    pub fn sign(&self, r: usize, i: u64) -> Result<i8> {
        self.signs[r].sign(i - 1)
    }

    /// The sign matrix scaled by `1/sqrt(rows)`, materialized for diagnostics.
    pub fn scaled_sign_matrix(&self) -> DenseMatrix<T> {
        let scale = T::from(self.cfg.rows).expect("row count is representable").sqrt().recip();
        DenseMatrix::from_fn(self.cfg.rows, self.cfg.n as usize, |r, i| {
            T::from(self.signs[r].apply(i as u64)).expect("sign is representable") * scale
        })
    }

    pub fn update(&mut self, u: TurnstileUpdate) -> Result<()> {
        if u.row == 0 || u.row > self.cfg.n || u.col == 0 || u.col > self.cfg.d {
            return Err(Error::Domain(format!(
                "entry ({}, {}) outside [{}]x[{}]",
                u.row, u.col, self.cfg.n, self.cfg.d
            )));
        }
        if u.delta == 0 {
            return Ok(());
        }
        if self.column_cache.as_ref().is_none_or(|(i, _)| *i != u.row) {
            let col = self.signs.iter().map(|s| s.apply(u.row - 1)).collect();
            self.column_cache = Some((u.row, col));
        }
        let delta = T::from(u.delta).expect("delta is representable");
        let col = &self.column_cache.as_ref().expect("just filled").1;
        let j = (u.col - 1) as usize;
        for (r, &s) in col.iter().enumerate() {
            let v = *self.sketch.get(r, j);
            self.sketch.set(r, j, if s > 0 { v + delta } else { v - delta });
        }
        Ok(())
    }

    /// Canonical basis of the row space of `S A`, one vector per row; empty
    /// for the zero matrix.
    pub fn finalize(&self, tol: T) -> Result<DenseMatrix<T>> {
        let q = qr_orthonormal_basis(&self.sketch, tol);
        if q.rows() > self.cfg.k {
            return Err(Error::RankPromise { rank: q.rows(), bound: self.cfg.k });
        }
        let pi = projection_from_basis(&q, tol)?;
        canonical_subspace_basis(&pi, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    type B = BasisRecovery<f64>;

    fn cfg() -> BasisRecoveryConfig {
        BasisRecoveryConfig::new(16, 4, 2)
    }

    #[test]
    fn zero_and_axis() {
        let b = B::new(cfg(), &Seed::from_u64(1), 4).unwrap();
        assert_eq!(b.finalize(DEFAULT_TOL).unwrap().rows(), 0);
        let mut b = B::new(cfg(), &Seed::from_u64(1), 4).unwrap();
        b.update(TurnstileUpdate::matrix(1, 1, 0)).unwrap();
        assert!(b.sketch().is_zero());
        b.update(TurnstileUpdate::matrix(1, 1, 1)).unwrap();
        for r in 0..b.config().rows {
            assert_eq!(*b.sketch().get(r, 0), b.sign(r, 1).unwrap() as f64);
        }
        let basis = b.finalize(DEFAULT_TOL).unwrap();
        assert_eq!(basis.row_vecs(), vec![vec![1.0, 0.0, 0.0, 0.0]]);
    }

    #[test]
    fn linearity_and_cancellation() {
        let seed = Seed::from_u64(4);
        let ups = [(3u64, 1u64, 2i64), (3, 2, -1), (7, 4, 5), (16, 3, 1)];
        let mut b = B::new(cfg(), &seed, 4).unwrap();
        ups.iter().for_each(|&(i, j, d)| b.update(TurnstileUpdate::matrix(i, j, d)).unwrap());
        ups.iter().for_each(|&(i, j, d)| b.update(TurnstileUpdate::matrix(i, j, -d)).unwrap());
        assert!(b.sketch().is_zero());
    }

    #[test]
    fn rank_promise_violation() {
        let mut b = B::new(cfg(), &Seed::from_u64(5), 4).unwrap();
        for j in 1..=3 {
            b.update(TurnstileUpdate::matrix(j, j, 1)).unwrap();
        }
        assert!(matches!(b.finalize(DEFAULT_TOL), Err(Error::RankPromise { rank: 3, bound: 2 })));
    }

    #[test]
    fn rows_default() {
        assert_eq!(BasisRecoveryConfig::new(64, 16, 4).rows, 192);
        assert_eq!(BasisRecoveryConfig::new(64, 16, 4).independence(), 10);
    }
}
