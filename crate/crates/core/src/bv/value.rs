use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use super::word::BitWord;

/// A concrete bit-vector: `width` bits, bit 0 least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BvValue<W> {
    width: usize,
    word: W,
}

impl<W: BitWord> BvValue<W> {
    /// Builds a value, truncating `word` to `width` bits.
    ///
    /// Panics if `width` is zero or too wide for `W`.
    pub fn new(width: usize, word: W) -> Self {
        assert!(width >= 1, "bit-vectors have at least one bit");
        assert!(W::fits(width), "width {width} does not fit the word type");
        Self { width, word: word.and(&W::low_mask(width)) }
    }

    pub fn from_u64(width: usize, value: u64) -> Self {
        Self::new(width, W::from_u64(value))
    }

    pub fn from_biguint(width: usize, value: &BigUint) -> Self {
        let masked = value & &<BigUint as BitWord>::low_mask(width);
        Self::new(width, W::from_biguint(&masked))
    }

    /// Builds a value from its bits, index 0 least significant.
    pub fn from_bits(bits: &[bool]) -> Self {
        let word = bits
            .iter()
            .rev()
            .fold(W::zero(), |acc, &b| {
                let shifted = acc.shl_bits(1);
                if b {
                    shifted.or(&W::one())
                } else {
                    shifted
                }
            });
        Self::new(bits.len(), word)
    }

    pub fn zero(width: usize) -> Self {
        Self::new(width, W::zero())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The unsigned value.
    pub fn word(&self) -> &W {
        &self.word
    }

    pub fn to_biguint(&self) -> BigUint {
        self.word.to_biguint()
    }

    pub fn bit(&self, i: usize) -> bool {
        i < self.width && self.word.bit(i)
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.word.bit(i))
    }

    /// The sign bit of the two's-complement reading.
    pub fn msb(&self) -> bool {
        self.word.bit(self.width - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.word.is_zero()
    }
}

impl<W: BitWord> fmt::Display for BvValue<W> {
    /// `#b...`, most significant bit first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("#b")?;
        for i in (0..self.width).rev() {
            f.write_str(if self.word.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Values for variables, keyed by name.
pub type Assignment<W> = BTreeMap<String, BvValue<W>>;
