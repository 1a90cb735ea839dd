use rand::Rng;

/// Approximate counter storing only an exponent `X`; `2^X − 1` is an unbiased
/// estimate of the number of increments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MorrisCounter {
    exponent: u32,
}

impl MorrisCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Increment `X` with probability `2^-X`, from `X` fair coin flips.
    pub fn update<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut left = self.exponent;
        while left > 0 {
            let take = left.min(64);
            let bits = rng.random::<u64>() & if take == 64 { u64::MAX } else { (1 << take) - 1 };
            if bits != 0 {
                return;
            }
            left -= take;
        }
        self.exponent += 1;
    }

    pub fn estimate(&self) -> f64 {
        2f64.powi(self.exponent as i32) - 1.0
    }
}
