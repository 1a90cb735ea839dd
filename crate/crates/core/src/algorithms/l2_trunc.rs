//! ℓ2 norm estimation whose output concentrates on two values: a very accurate
//! AMS estimate, truncated to its leading significant bits.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::randomness::field::ceil_log2;
use crate::randomness::Seed;
use crate::samplers::{AmsConfig, AmsSketch};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedL2Config {
    pub epsilon: f64,
    pub bits_kept: u32,
}

impl TruncatedL2Config {
    /// `bits_kept = max(2 ceil(log2(1/ε)), 5)`.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidSpec(format!("epsilon {epsilon} outside (0, 1)")));
        }
        let inv = (1.0 / epsilon - 1e-9).ceil() as u64;
        Ok(TruncatedL2Config { epsilon, bits_kept: (2 * ceil_log2(inv)).max(5) })
    }

    /// Counters per repetition: `2^(2(bits_kept + 1))`.
    pub fn ams_width(&self) -> usize {
        1usize << (2 * (self.bits_kept + 1))
    }
}

/// Keep the leading `bits` significant bits of `v > 0` and zero the rest,
/// working on the exact mantissa and exponent. The result rounds `v` down by
/// a relative error below `2^(1 - bits)`.
pub fn truncate_l2<T: Float>(v: T, bits: u32) -> Result<T> {
    if !v.is_finite() || v <= T::zero() {
        return Err(Error::Domain("truncation needs a positive finite input".into()));
    }
    if bits == 0 {
        return Err(Error::InvalidSpec("must keep at least one bit".into()));
    }
    let (mantissa, exponent, _) = v.integer_decode();
    let len = 64 - mantissa.leading_zeros();
    let kept = if len > bits { mantissa >> (len - bits) << (len - bits) } else { mantissa };
    let two = T::one() + T::one();
    // split the scaling so subnormal exponents do not underflow early
    let half = exponent / 2;
    Ok(T::from(kept).expect("mantissa fits the float type")
        * two.powi(half as i32)
        * two.powi((exponent - half) as i32))
}

#[derive(Debug, Clone)]
pub struct L2Truncated {
    cfg: TruncatedL2Config,
    ams: AmsSketch,
}

impl L2Truncated {
    pub fn new(n: u64, cfg: TruncatedL2Config, seed: &Seed) -> Result<Self> {
        let ams_cfg = AmsConfig { n, width: cfg.ams_width(), repetitions: AmsConfig::default_repetitions(n) };
        Self::with_ams(cfg, ams_cfg, seed)
    }

    pub fn with_ams(cfg: TruncatedL2Config, ams: AmsConfig, seed: &Seed) -> Result<Self> {
        Ok(L2Truncated { cfg, ams: AmsSketch::new(ams, seed)? })
    }

    pub fn update(&mut self, i: u64, delta: i64) -> Result<()> {
        self.ams.update(i, delta)
    }

    pub fn ams(&self) -> &AmsSketch {
        &self.ams
    }

    pub fn words(&self) -> u64 {
        self.ams.words()
    }

    pub fn estimate(&self) -> f64 {
        let raw = self.ams.estimate_l2();
        if raw == 0.0 {
            0.0
        } else {
            truncate_l2(raw, self.cfg.bits_kept).expect("positive finite estimate")
        }
    }
}
