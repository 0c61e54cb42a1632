//! Formula size with binary-encoded scalars.
//!
//! | node                     | size                                   |
//! |--------------------------|----------------------------------------|
//! | constant `c^[n]`         | `L(c) + L(n)`                          |
//! | variable `x^[n]`         | `1 + L(n)`                             |
//! | operation `o(t.., i..)`  | `1 + Σ |t_k| + Σ L(i_j)`               |
//! | quantifier `Q x^[n] φ`   | `|x^[n]| + |φ|`                        |
//!
//! Predicates and connectives count as operations without scalar arguments;
//! extraction is the only operation with scalar arguments (its two bounds).

use num_bigint::BigUint;
use num_traits::Zero;

use super::{BvFormula, BvTerm, Width};

/// Number of bits in the binary encoding of `n`, with `L(0) = 1`.
pub fn scalar_length(n: &BigUint) -> u64 {
    if n.is_zero() {
        1
    } else {
        n.bits()
    }
}

pub fn scalar_length_u64(n: u64) -> u64 {
    if n == 0 {
        1
    } else {
        u64::from(64 - n.leading_zeros())
    }
}

fn width_length(w: &Width) -> u64 {
    scalar_length(w.value())
}

pub fn term_size(t: &BvTerm) -> u64 {
    match t {
        BvTerm::Const { value, width } => scalar_length(value) + width_length(width),
        BvTerm::Var(v) => 1 + width_length(&v.width),
        BvTerm::Not(a) => 1 + term_size(a),
        BvTerm::Binary(_, a, b) | BvTerm::Concat(a, b) => 1 + term_size(a) + term_size(b),
        BvTerm::Extract { term, hi, lo } => 1 + term_size(term) + scalar_length(hi) + scalar_length(lo),
        BvTerm::Index { term, index } => 1 + term_size(term) + term_size(index),
    }
}

pub fn formula_size(phi: &BvFormula) -> u64 {
    match phi {
        BvFormula::Atom(_, a, b) => 1 + term_size(a) + term_size(b),
        BvFormula::And(a, b) | BvFormula::Or(a, b) => 1 + formula_size(a) + formula_size(b),
        BvFormula::Not(a) => 1 + formula_size(a),
        BvFormula::Quant(_, v, body) => 1 + width_length(&v.width) + formula_size(body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn scalar_lengths() {
        assert_eq!(scalar_length(&BigUint::zero()), 1);
        assert_eq!(scalar_length(&BigUint::from(5u32)), 3);
        assert_eq!(scalar_length(&(BigUint::one() << 1000u32)), 1001);
        for n in [0u64, 1, 2, 3, 7, 8, 255, 256, u64::MAX] {
            assert_eq!(scalar_length_u64(n), scalar_length(&BigUint::from(n)), "n = {n}");
        }
    }

    #[test]
    fn table_rows() {
        assert_eq!(term_size(&BvTerm::constant(7, 4)), 6);
        assert_eq!(term_size(&BvTerm::var("x", 6)), 4);
        assert_eq!(term_size(&BvTerm::extract(BvTerm::var("x", 6), 1, 1)), 7);
    }

    #[test]
    fn astronomical_width_is_measured_without_evaluation() {
        let w = Width::new(BigUint::one() << 1000u32).unwrap();
        let x = BvTerm::Var(super::super::BvVar::new("x", w.clone()));
        let phi = BvFormula::forall(
            super::super::BvVar::new("x", w.clone()),
            BvFormula::ule(x.clone(), x),
        );
        // quantifier 1 + 1001, atom 1, two variables 1 + 1001 each
        assert_eq!(formula_size(&phi), 1002 + 1 + 2 * 1002);
    }
}
