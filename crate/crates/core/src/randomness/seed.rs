//! Master seeds and counter-mode derivation of per-consumer entropy.
//!
//! A child seed is `SHA-256(len(tag) || tag || counter || parent)` with the
//! length and counter little-endian `u64`s. Every consumer of randomness uses
//! its own tag, so two consumers never share a stream even with equal
//! counters. The tags currently in use are listed in [`tags`].

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Domain-separation tags.
pub mod tags {
    /// Per-trial seed, counter = trial index.
    pub const TRIAL: &str = "trial";
    /// Synthetic stream generators.
    pub const GENERATOR: &str = "generator";
    /// Point-query / inner-product element hash.
    pub const HASH: &str = "hash";
    /// ℓ0 sampler subsampling hashes, counter = repetition.
    pub const L0_SUBSAMPLE: &str = "l0-subsample";
    /// ℓ0 sampler fingerprint points, counter = repetition.
    pub const L0_FINGERPRINT: &str = "l0-fingerprint";
    /// AMS bucket hashes, counter = repetition.
    pub const AMS_BUCKET: &str = "ams-bucket";
    /// AMS sign hashes, counter = repetition.
    pub const AMS_SIGN: &str = "ams-sign";
    /// Morris counter coin flips.
    pub const MORRIS: &str = "morris";
    /// Find-Duplicate sampler target positions.
    pub const DUP_TARGET: &str = "dup-target";
    /// Explicit test vector of the pseudo-deterministic nonzero-row algorithm.
    pub const NONZERO_ROW_X: &str = "nonzero-row-x";
    /// Nisan generator seed of the randomized nonzero-row algorithm.
    pub const PRG: &str = "prg";
    /// Basis-recovery sign rows, counter = sketch row.
    pub const BASIS_SIGN: &str = "basis-sign";
}

/// 256-bit seed. Serialized as 64 lowercase hex digits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed([u8; 32]);

impl Seed {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        Seed(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Seed from an arbitrary-length hex string. Strings that are exactly 64
    /// hex digits are taken verbatim; anything else is hashed down.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("0x");
        let bytes = hex::decode(s).map_err(|e| Error::InvalidSpec(format!("seed {s:?}: {e}")))?;
        if bytes.len() == 32 {
            let mut out = [0u8; 32];
            out.copy_from_slice(&bytes);
            Ok(Seed(out))
        } else {
            Ok(Seed(sha256(&[b"seed", &bytes])))
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Seed(sha256(&[b"seed", &v.to_le_bytes()]))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn derive(&self, tag: &str, counter: u64) -> Seed {
        Seed(sha256(&[&(tag.len() as u64).to_le_bytes(), tag.as_bytes(), &counter.to_le_bytes(), &self.0]))
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::from_seed(self.0)
    }

    /// Shorthand for `self.derive(tag, counter).rng()`.
    pub fn rng_for(&self, tag: &str, counter: u64) -> ChaCha20Rng {
        self.derive(tag, counter).rng()
    }
}

fn sha256(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    let digest = h.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    out
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({})", self.to_hex())
    }
}

impl FromStr for Seed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Seed::from_hex(s)
    }
}
