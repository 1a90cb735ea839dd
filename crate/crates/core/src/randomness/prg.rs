//! Nisan's generator for space-bounded computation.
//!
//! Blocks are `b`-bit elements of `GF(2^b)` with `b = min(2s, 63)` for
//! space parameter `s`; blocks of only `s` bits are measurably distinguishable
//! by `2^s`-state counters. With `ℓ` levels and affine
//! pairwise-independent maps `h_j(v) = a_j v + b_j`,
//!
//! ```text
//! G_0(v) = v
//! G_j(v) = G_{j-1}(v) || G_{j-1}(h_j(v))
//! ```
//!
//! so block `b` of `G_ℓ(x)` is `x` pushed through `h_ℓ, ..., h_1`, applying
//! `h_j` exactly when bit `j-1` of `b` is set. Any bit is computable from the
//! seed with `O(ℓ)` field multiplications and no materialized output.

use rand::Rng;

use super::field::ceil_log2;
use super::gf2::Gf2Field;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrgSpec {
    space_param: u32,
    output_length: u64,
    block_bits: u32,
}

impl PrgSpec {
    pub fn new(space_param: u32, output_length: u64) -> Result<Self> {
        let block_bits = space_param.saturating_mul(2).min(Gf2Field::MAX_DEGREE);
        Self::with_block_bits(space_param, output_length, block_bits)
    }

    /// Explicit block width, `s <= block_bits <= 63`.
    pub fn with_block_bits(space_param: u32, output_length: u64, block_bits: u32) -> Result<Self> {
        if space_param == 0 || space_param > Gf2Field::MAX_DEGREE {
            return Err(Error::InvalidSpec(format!(
                "space parameter {space_param} outside 1..={}",
                Gf2Field::MAX_DEGREE
            )));
        }
        if block_bits < space_param || block_bits > Gf2Field::MAX_DEGREE {
            return Err(Error::InvalidSpec(format!(
                "block width {block_bits} outside {space_param}..={}",
                Gf2Field::MAX_DEGREE
            )));
        }
        if output_length == 0 {
            return Err(Error::InvalidSpec("output length must be positive".into()));
        }
        Ok(PrgSpec { space_param, output_length, block_bits })
    }

    pub fn space_param(&self) -> u32 {
        self.space_param
    }

    pub fn output_length(&self) -> u64 {
        self.output_length
    }

    pub fn block_bits(&self) -> u32 {
        self.block_bits
    }

    /// Recursion depth: `ceil(log2(ceil(r / b)))`; zero when `r <= b`.
    pub fn levels(&self) -> u32 {
        ceil_log2(self.output_length.div_ceil(self.block_bits as u64))
    }

    pub fn blocks(&self) -> u64 {
        1 << self.levels()
    }

    /// One base block plus two blocks per level.
    pub fn seed_bits(&self) -> u64 {
        self.block_bits as u64 * (1 + 2 * self.levels() as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrgSeed {
    spec: PrgSpec,
    field: Gf2Field,
    base: u64,
    /// `levels[j-1] = (a_j, b_j)`.
    levels: Vec<(u64, u64)>,
}

impl PrgSeed {
    pub fn sample<R: Rng + ?Sized>(spec: PrgSpec, rng: &mut R) -> Self {
        let field = Gf2Field::new(spec.block_bits).expect("validated by PrgSpec");
        let mask = field.mask();
        let base = rng.random::<u64>() & mask;
        let levels = (0..spec.levels()).map(|_| (rng.random::<u64>() & mask, rng.random::<u64>() & mask)).collect();
        PrgSeed { spec, field, base, levels }
    }

    /// Seed from its bit string: base block, then `a_1, b_1, a_2, b_2, ...`,
    /// each one block wide, little-endian.
    pub fn from_bits(spec: PrgSpec, bits: &[bool]) -> Result<Self> {
        if bits.len() as u64 != spec.seed_bits() {
            return Err(Error::InvalidSpec(format!("seed has {} bits, expected {}", bits.len(), spec.seed_bits())));
        }
        let field = Gf2Field::new(spec.block_bits).expect("validated by PrgSpec");
        let s = spec.block_bits as usize;
        let word =
            |k: usize| bits[k * s..(k + 1) * s].iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
        let levels = (0..spec.levels() as usize).map(|j| (word(1 + 2 * j), word(2 + 2 * j))).collect();
        Ok(PrgSeed { spec, field, base: word(0), levels })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let s = self.spec.block_bits as usize;
        std::iter::once(self.base)
            .chain(self.levels.iter().flat_map(|&(a, b)| [a, b]))
            .flat_map(|w| (0..s).map(move |i| (w >> i) & 1 == 1))
            .collect()
    }

    pub fn spec(&self) -> &PrgSpec {
        &self.spec
    }

    #[inline]
    fn step(&self, level: usize, v: u64) -> u64 {
        let (a, b) = self.levels[level];
        self.field.mul(a, v) ^ b
    }

    /// Block `b` of the full `b * 2^ℓ`-bit expansion.
    pub fn block(&self, b: u64) -> u64 {
        let mut v = self.base;
        for j in (0..self.levels.len()).rev() {
            if (b >> j) & 1 == 1 {
                v = self.step(j, v);
            }
        }
        v
    }

    pub fn bit(&self, index: u64) -> Result<bool> {
        if index >= self.spec.output_length {
            return Err(Error::Domain(format!("PRG bit {index} outside [0, {})", self.spec.output_length)));
        }
        let s = self.spec.block_bits as u64;
        Ok((self.block(index / s) >> (index % s)) & 1 == 1)
    }

    /// `width` consecutive bits starting at `start`, packed little-endian.
    pub fn bits_le(&self, start: u64, width: u32) -> Result<u64> {
        if width > 64 || start + width as u64 > self.spec.output_length {
            return Err(Error::Domain(format!("bit group {start}+{width} out of range")));
        }
        let s = self.spec.block_bits as u64;
        let mut out = 0u64;
        let mut filled = 0u32;
        let mut pos = start;
        while filled < width {
            let block = self.block(pos / s);
            let offset = (pos % s) as u32;
            let take = (s as u32 - offset).min(width - filled);
            let chunk = (block >> offset) & low_mask(take);
            out |= chunk << filled;
            filled += take;
            pos += take as u64;
        }
        Ok(out)
    }

    /// All `r` output bits, generated block by block.
    pub fn expand(&self) -> Vec<bool> {
        let mut blocks = Vec::with_capacity(self.spec.blocks() as usize);
        self.fill(self.levels.len(), self.base, &mut blocks);
        let s = self.spec.block_bits as usize;
        blocks
            .iter()
            .flat_map(|&v| (0..s).map(move |i| (v >> i) & 1 == 1))
            .take(self.spec.output_length as usize)
            .collect()
    }

    fn fill(&self, level: usize, v: u64, out: &mut Vec<u64>) {
        if level == 0 {
            out.push(v);
        } else {
            self.fill(level - 1, v, out);
            self.fill(level - 1, self.step(level - 1, v), out);
        }
    }
}

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::Seed;

    #[test]
    fn zero_levels_output_base_block() {
        let spec = PrgSpec::new(8, 8).unwrap();
        assert_eq!(spec.levels(), 0);
        let seed = PrgSeed::sample(spec, &mut Seed::from_u64(1).rng());
        let bits = seed.to_bits();
        assert_eq!(bits.len(), 16);
        assert_eq!(seed.expand(), bits[..8].to_vec());
        let spec = PrgSpec::with_block_bits(8, 8, 8).unwrap();
        let seed = PrgSeed::sample(spec, &mut Seed::from_u64(1).rng());
        assert_eq!(seed.expand(), seed.to_bits());
        let spec = PrgSpec::new(8, 5).unwrap();
        let seed = PrgSeed::sample(spec, &mut Seed::from_u64(2).rng());
        assert_eq!(seed.expand(), seed.to_bits()[..5].to_vec());
    }

    #[test]
    fn random_access_matches_expansion() {
        let spec = PrgSpec::new(8, 256).unwrap();
        assert_eq!(spec.block_bits(), 16);
        assert_eq!(spec.levels(), 4);
        assert_eq!(spec.seed_bits(), 144);
        for k in 0..20 {
            let seed = PrgSeed::sample(spec, &mut Seed::from_u64(k).rng());
            let all = seed.expand();
            assert_eq!(all.len(), 256);
            for (i, &b) in all.iter().enumerate() {
                assert_eq!(seed.bit(i as u64).unwrap(), b);
            }
            let group = seed.bits_le(5, 17).unwrap();
            let expect = (0..17).fold(0u64, |acc, t| acc | (all[5 + t] as u64) << t);
            assert_eq!(group, expect);
        }
    }

    #[test]
    fn recursion_structure() {
        // second half of G_j(x) is G_{j-1}(h_j(x))
        let spec = PrgSpec::with_block_bits(6, 6 * 8, 6).unwrap();
        let seed = PrgSeed::sample(spec, &mut Seed::from_u64(9).rng());
        let (a3, b3) = seed.levels[2];
        let shifted = PrgSeed {
            base: seed.field.mul(a3, seed.base) ^ b3,
            levels: seed.levels[..2].to_vec(),
            spec: PrgSpec::with_block_bits(6, 24, 6).unwrap(),
            field: seed.field,
        };
        let full = seed.expand();
        assert_eq!(&full[24..], &shifted.expand()[..]);
    }

    #[test]
    fn bits_round_trip_and_errors() {
        let spec = PrgSpec::new(5, 37).unwrap();
        let seed = PrgSeed::sample(spec, &mut Seed::from_u64(4).rng());
        let again = PrgSeed::from_bits(spec, &seed.to_bits()).unwrap();
        assert_eq!(again, seed);
        assert!(seed.bit(37).is_err());
        assert!(seed.bit(36).is_ok());
        assert_eq!(seed.bit(3).unwrap(), seed.bit(3).unwrap());
        assert!(PrgSeed::from_bits(spec, &[true; 3]).is_err());
        assert!(PrgSpec::new(0, 4).is_err());
        assert!(PrgSpec::new(64, 4).is_err());
        assert!(PrgSpec::new(8, 0).is_err());
        assert!(PrgSpec::with_block_bits(8, 8, 7).is_err());
        assert_eq!(PrgSpec::new(40, 10).unwrap().block_bits(), 63);
    }
}
