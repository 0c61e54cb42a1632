//! Machine words carrying bit-vector contents.
//!
//! Evaluation is written once against [`BitWord`]. `u128` is the fast path:
//! every width up to 64 fits with room for an unreduced product or shift.
//! `BigUint` takes everything else.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub trait BitWord: Clone + Debug + Eq + Ord + Hash + Send + Sync + Zero + One + ToPrimitive {
    /// Widest bit-vector this word can carry, `None` if unbounded.
    const MAX_WIDTH: Option<usize>;

    /// Converts from an arbitrary-precision value. The caller guarantees it fits.
    fn from_biguint(v: &BigUint) -> Self;
    fn to_biguint(&self) -> BigUint;
    fn from_u64(v: u64) -> Self;

    fn bit(&self, i: usize) -> bool;
    /// `2^width - 1`.
    fn low_mask(width: usize) -> Self;
    /// Left shift without truncation; the caller masks.
    fn shl_bits(&self, n: usize) -> Self;
    fn shr_bits(&self, n: usize) -> Self;
    fn and(&self, o: &Self) -> Self;
    fn or(&self, o: &Self) -> Self;
    fn xor(&self, o: &Self) -> Self;
    /// Sum and product without truncation; the caller masks.
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Floor division; `o` is nonzero.
    fn div(&self, o: &Self) -> Self;

    /// Whether a `width`-bit vector fits.
    fn fits(width: usize) -> bool {
        Self::MAX_WIDTH.is_none_or(|max| width <= max)
    }
}

impl BitWord for u128 {
    const MAX_WIDTH: Option<usize> = Some(64);

    fn from_biguint(v: &BigUint) -> Self {
        v.to_u128().expect("value fits in 128 bits")
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn from_u64(v: u64) -> Self {
        u128::from(v)
    }

    fn bit(&self, i: usize) -> bool {
        i < 128 && (self >> i) & 1 == 1
    }

    fn low_mask(width: usize) -> Self {
        if width >= 128 {
            u128::MAX
        } else {
            (1u128 << width) - 1
        }
    }

    fn shl_bits(&self, n: usize) -> Self {
        if n >= 128 {
            0
        } else {
            self << n
        }
    }

    fn shr_bits(&self, n: usize) -> Self {
        if n >= 128 {
            0
        } else {
            self >> n
        }
    }

    fn and(&self, o: &Self) -> Self {
        self & o
    }

    fn or(&self, o: &Self) -> Self {
        self | o
    }

    fn xor(&self, o: &Self) -> Self {
        self ^ o
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl BitWord for BigUint {
    const MAX_WIDTH: Option<usize> = None;

    fn from_biguint(v: &BigUint) -> Self {
        v.clone()
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }

    fn bit(&self, i: usize) -> bool {
        BigUint::bit(self, i as u64)
    }

    fn low_mask(width: usize) -> Self {
        (BigUint::one() << width) - 1u32
    }

    fn shl_bits(&self, n: usize) -> Self {
        self << n
    }

    fn shr_bits(&self, n: usize) -> Self {
        self >> n
    }

    fn and(&self, o: &Self) -> Self {
        self & o
    }

    fn or(&self, o: &Self) -> Self {
        self | o
    }

    fn xor(&self, o: &Self) -> Self {
        self ^ o
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn div(&self, o: &Self) -> Self {
        self / o
    }
}
