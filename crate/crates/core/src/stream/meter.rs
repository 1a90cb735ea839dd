use crate::error::{Error, Result};

/// Word-granular memory accounting. One word is `word_bits` bits, normally
/// `ceil(log2 max(n, m, d))` for the stream being processed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpaceMeter {
    current: i64,
    peak: i64,
    word_bits: u32,
}

impl SpaceMeter {
    pub fn new(word_bits: u32) -> Self {
        SpaceMeter { current: 0, peak: 0, word_bits }
    }

    /// Allocate (`words > 0`) or release (`words < 0`).
    pub fn charge(&mut self, words: i64) -> Result<()> {
        let next = self.current + words;
        if next < 0 {
            return Err(Error::Accounting(format!("release of {} words leaves a balance of {next}", -words)));
        }
        self.current = next;
        self.peak = self.peak.max(next);
        Ok(())
    }

    pub fn current_words(&self) -> u64 {
        self.current as u64
    }

    pub fn peak_words(&self) -> u64 {
        self.peak as u64
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    pub fn peak_bits(&self) -> u64 {
        self.peak as u64 * self.word_bits as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charge_and_release() {
        let mut m = SpaceMeter::new(10);
        assert_eq!((m.current_words(), m.peak_words()), (0, 0));
        m.charge(5).unwrap();
        m.charge(-2).unwrap();
        assert_eq!((m.current_words(), m.peak_words()), (3, 5));
        assert!(matches!(m.charge(-4), Err(Error::Accounting(_))));
        assert_eq!(m.current_words(), 3);
        assert_eq!(m.peak_bits(), 50);
    }
}
