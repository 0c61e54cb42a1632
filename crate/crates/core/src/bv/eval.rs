//! Concrete semantics.
//!
//! - `+`, `*` wrap modulo `2^n`.
//! - `x / 0 = 2^n - 1`.
//! - Shifts take the unsigned value of the whole right operand; shifting by
//!   `n` or more gives zero.
//! - `concat(a, b)` puts `a` in the high bits.
//! - `≤s` compares two's-complement values.

use num_traits::ToPrimitive;
use thiserror::Error;

use super::value::{Assignment, BvValue};
use super::word::BitWord;
use super::{BinOp, BvFormula, BvTerm, Pred, Width};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalLimits {
    /// Widest node evaluation will materialize.
    pub width_cap: usize,
}

impl Default for EvalLimits {
    fn default() -> Self {
        Self { width_cap: 1 << 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BvEvalError {
    #[error("width {width} exceeds the evaluation cap of {cap} bits")]
    WidthCap { width: Width, cap: usize },
    #[error("width {0} does not fit the selected word type")]
    WordTooNarrow(Width),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("variable `{name}` has width {expected} but is assigned a {found}-bit value")]
    AssignedWidth { name: String, expected: Width, found: usize },
    #[error("ill-sorted term: {0}")]
    IllSorted(String),
    #[error("quantifier over `{0}` in a formula expected to be quantifier-free")]
    UnexpectedQuantifier(String),
}

/// Source of variable values.
pub trait Env<W> {
    fn lookup(&self, name: &str) -> Option<&BvValue<W>>;
}

impl<W> Env<W> for Assignment<W> {
    fn lookup(&self, name: &str) -> Option<&BvValue<W>> {
        self.get(name)
    }
}

/// Innermost binding last.
impl<W> Env<W> for [(String, BvValue<W>)] {
    fn lookup(&self, name: &str) -> Option<&BvValue<W>> {
        self.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

pub(crate) fn resolve_width<W: BitWord>(w: &Width, limits: &EvalLimits) -> Result<usize, BvEvalError> {
    match w.to_usize() {
        Some(n) if n <= limits.width_cap => {
            if W::fits(n) {
                Ok(n)
            } else {
                Err(BvEvalError::WordTooNarrow(w.clone()))
            }
        }
        _ => Err(BvEvalError::WidthCap { width: w.clone(), cap: limits.width_cap }),
    }
}

pub fn eval_term<W, E>(t: &BvTerm, env: &E, limits: &EvalLimits) -> Result<BvValue<W>, BvEvalError>
where
    W: BitWord,
    E: Env<W> + ?Sized,
{
    match t {
        BvTerm::Const { value, width } => {
            let n = resolve_width::<W>(width, limits)?;
            if value.bits() > n as u64 {
                return Err(BvEvalError::IllSorted(format!("constant {value} exceeds {n} bit(s)")));
            }
            Ok(BvValue::from_biguint(n, value))
        }
        BvTerm::Var(v) => {
            let n = resolve_width::<W>(&v.width, limits)?;
            let value = env.lookup(&v.name).ok_or_else(|| BvEvalError::Unbound(v.name.clone()))?;
            if value.width() != n {
                return Err(BvEvalError::AssignedWidth {
                    name: v.name.clone(),
                    expected: v.width.clone(),
                    found: value.width(),
                });
            }
            Ok(value.clone())
        }
        BvTerm::Not(a) => {
            let a = eval_term(a, env, limits)?;
            let n = a.width();
            Ok(BvValue::new(n, a.word().xor(&W::low_mask(n))))
        }
        BvTerm::Binary(op, a, b) => {
            let a = eval_term(a, env, limits)?;
            let b = eval_term(b, env, limits)?;
            same_width(op.symbol(), &a, &b)?;
            Ok(apply_binary(*op, &a, &b))
        }
        BvTerm::Concat(a, b) => {
            let hi = eval_term(a, env, limits)?;
            let lo = eval_term(b, env, limits)?;
            let n = resolve_width::<W>(&Width::of((hi.width() + lo.width()) as u64), limits)?;
            Ok(BvValue::new(n, hi.word().shl_bits(lo.width()).or(lo.word())))
        }
        BvTerm::Extract { term, hi, lo } => {
            let v = eval_term(term, env, limits)?;
            let (Some(h), Some(l)) = (hi.to_usize(), lo.to_usize()) else {
                return Err(BvEvalError::IllSorted(format!("extract [{hi}:{lo}] out of range")));
            };
            if l > h || h >= v.width() {
                return Err(BvEvalError::IllSorted(format!(
                    "extract [{h}:{l}] out of range for width {}",
                    v.width()
                )));
            }
            Ok(BvValue::new(h - l + 1, v.word().shr_bits(l)))
        }
        BvTerm::Index { term, index } => {
            let v = eval_term(term, env, limits)?;
            let s = eval_term(index, env, limits)?;
            same_width("index", &v, &s)?;
            let bit = s.word().to_usize().is_some_and(|i| v.bit(i));
            Ok(BvValue::from_u64(1, u64::from(bit)))
        }
    }
}

fn same_width<W>(op: &str, a: &BvValue<W>, b: &BvValue<W>) -> Result<(), BvEvalError>
where
    W: BitWord,
{
    if a.width() == b.width() {
        Ok(())
    } else {
        Err(BvEvalError::IllSorted(format!(
            "operands of `{op}` have widths {} and {}",
            a.width(),
            b.width()
        )))
    }
}

fn shift_amount<W: BitWord>(amount: &W, width: usize) -> Option<usize> {
    amount.to_usize().filter(|&s| s < width)
}

fn apply_binary<W: BitWord>(op: BinOp, a: &BvValue<W>, b: &BvValue<W>) -> BvValue<W> {
    let n = a.width();
    let (x, y) = (a.word(), b.word());
    let word = match op {
        BinOp::Add => x.add(y),
        BinOp::Mul => x.mul(y),
        BinOp::Udiv if y.is_zero() => W::low_mask(n),
        BinOp::Udiv => x.div(y),
        BinOp::And => x.and(y),
        BinOp::Or => x.or(y),
        BinOp::Xor => x.xor(y),
        BinOp::Shl => match shift_amount(y, n) {
            Some(s) => x.shl_bits(s),
            None => W::zero(),
        },
        BinOp::Lshr => match shift_amount(y, n) {
            Some(s) => x.shr_bits(s),
            None => W::zero(),
        },
    };
    BvValue::new(n, word)
}

/// Evaluates a quantifier-free formula.
pub fn eval_formula<W, E>(phi: &BvFormula, env: &E, limits: &EvalLimits) -> Result<bool, BvEvalError>
where
    W: BitWord,
    E: Env<W> + ?Sized,
{
    match phi {
        BvFormula::Atom(p, a, b) => {
            let a = eval_term::<W, E>(a, env, limits)?;
            let b = eval_term::<W, E>(b, env, limits)?;
            same_width(p.symbol(), &a, &b)?;
            Ok(compare(*p, &a, &b))
        }
        BvFormula::And(a, b) => {
            Ok(eval_formula::<W, E>(a, env, limits)? && eval_formula::<W, E>(b, env, limits)?)
        }
        BvFormula::Or(a, b) => {
            Ok(eval_formula::<W, E>(a, env, limits)? || eval_formula::<W, E>(b, env, limits)?)
        }
        BvFormula::Not(a) => Ok(!eval_formula::<W, E>(a, env, limits)?),
        BvFormula::Quant(_, v, _) => Err(BvEvalError::UnexpectedQuantifier(v.name.clone())),
    }
}

pub(crate) fn compare<W: BitWord>(p: Pred, a: &BvValue<W>, b: &BvValue<W>) -> bool {
    match p {
        Pred::Eq => a == b,
        Pred::Ule => a.word() <= b.word(),
        Pred::Sle => {
            let sign = W::one().shl_bits(a.width() - 1);
            a.word().xor(&sign) <= b.word().xor(&sign)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn lim() -> EvalLimits {
        EvalLimits::default()
    }

    fn eval_closed(t: &BvTerm) -> BvValue<u128> {
        eval_term(t, &Assignment::<u128>::new(), &lim()).unwrap()
    }

    #[test]
    fn extract_reads_least_significant_first() {
        let mut a = Assignment::<u128>::new();
        a.insert("x".into(), BvValue::from_u64(6, 0b000010));
        let v = eval_term(&BvTerm::extract(BvTerm::var("x", 6), 1, 1), &a, &lim()).unwrap();
        assert_eq!(v, BvValue::from_u64(1, 1));
    }

    #[test]
    fn division_by_zero_is_all_ones() {
        let t = BvTerm::binary(BinOp::Udiv, BvTerm::constant(5, 4), BvTerm::constant(0, 4));
        assert_eq!(eval_closed(&t), BvValue::from_u64(4, 15));
    }

    #[test]
    fn concat_places_first_operand_high() {
        let low = BvTerm::concat(
            BvTerm::concat(BvTerm::constant(1, 1), BvTerm::constant(0, 1)),
            BvTerm::constant(1, 1),
        );
        let t = BvTerm::concat(BvTerm::constant(0, 5), low);
        assert_eq!(eval_closed(&t), BvValue::from_u64(8, 0b00000101));
    }

    #[test]
    fn predicates() {
        let a = Assignment::<u128>::new();
        let c = |v, w| BvTerm::constant(v, w);
        assert!(eval_formula(&BvFormula::eq(c(1, 1), c(1, 1)), &a, &lim()).unwrap());
        assert!(!eval_formula(&BvFormula::ule(c(7, 3), c(0, 3)), &a, &lim()).unwrap());
        assert!(eval_formula(&BvFormula::sle(c(7, 3), c(0, 3)), &a, &lim()).unwrap());
        assert!(!eval_formula(&BvFormula::sle(c(3, 3), c(4, 3)), &a, &lim()).unwrap());
    }

    #[test]
    fn overshift_yields_zero() {
        let t = BvTerm::binary(BinOp::Shl, BvTerm::constant(1, 3), BvTerm::constant(3, 3));
        assert_eq!(eval_closed(&t), BvValue::from_u64(3, 0));
        let t = BvTerm::binary(BinOp::Lshr, BvTerm::constant(4, 3), BvTerm::constant(2, 3));
        assert_eq!(eval_closed(&t), BvValue::from_u64(3, 1));
    }

    #[test]
    fn arithmetic_wraps() {
        let t = BvTerm::binary(BinOp::Add, BvTerm::constant(15, 4), BvTerm::constant(3, 4));
        assert_eq!(eval_closed(&t), BvValue::from_u64(4, 2));
        let t = BvTerm::binary(BinOp::Mul, BvTerm::constant(7, 4), BvTerm::constant(7, 4));
        assert_eq!(eval_closed(&t), BvValue::from_u64(4, 49 % 16));
    }

    #[test]
    fn wide_values_go_through_biguint() {
        let w = 100u64;
        let t = BvTerm::binary(BinOp::Add, BvTerm::Const {
            value: (BigUint::from(1u32) << 99u32),
            width: Width::of(w),
        }, BvTerm::Const { value: (BigUint::from(1u32) << 99u32), width: Width::of(w) });
        let v: BvValue<BigUint> = eval_term(&t, &Assignment::new(), &lim()).unwrap();
        assert!(v.is_zero());
        let narrow: Result<BvValue<u128>, _> = eval_term(&t, &Assignment::new(), &lim());
        assert!(matches!(narrow, Err(BvEvalError::WordTooNarrow(_))));
    }

    #[test]
    fn width_cap_and_unbound() {
        let t = BvTerm::var("x", 1 << 21);
        let r: Result<BvValue<BigUint>, _> = eval_term(&t, &Assignment::new(), &lim());
        assert!(matches!(r, Err(BvEvalError::WidthCap { .. })));
        let r: Result<BvValue<u128>, _> = eval_term(&BvTerm::var("x", 2), &Assignment::new(), &lim());
        assert_eq!(r, Err(BvEvalError::Unbound("x".into())));
    }
}
