use num_bigint::BigUint;
use thiserror::Error;

use super::eval::{compare, eval_term, resolve_width, BvEvalError, EvalLimits};
use super::sort::{check_sorts, SortError};
use super::value::BvValue;
use super::word::BitWord;
use super::{BvFormula, BvVar, Width};
use crate::{Quantifier, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveBudget {
    /// Widest term node the solver will evaluate.
    pub width_cap: usize,
    /// Largest sum of quantified variable widths.
    pub quantified_bits: u64,
}

impl Default for SolveBudget {
    fn default() -> Self {
        Self { width_cap: 1 << 20, quantified_bits: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("formula has free variables: {}", .0.join(", "))]
    NotClosed(Vec<String>),
    #[error(transparent)]
    Eval(#[from] BvEvalError),
}

/// Values chosen for the outermost existential block, in prefix order.
pub type BvWitness = Vec<(BvVar, BvValue<BigUint>)>;

/// Decides a closed formula by quantifier expansion.
///
/// `∃x^[n]` tries the values `0..2^n` in increasing order and succeeds on the
/// first satisfying one; `∀x^[n]` requires all of them. Quantifiers may occur
/// anywhere, not only in a prefix. The witness is the least satisfying tuple
/// for the leading existential block, outermost variable most significant.
pub fn solve_bv2(phi: &BvFormula, budget: &SolveBudget) -> Result<Verdict<BvWitness>, SolveError> {
    let info = check_sorts(phi)?;
    if !info.free_vars.is_empty() {
        return Err(SolveError::NotClosed(info.free_vars.into_keys().collect()));
    }

    let total: BigUint = info.bound_vars.iter().map(|v| v.width.value().clone()).sum();
    if total > BigUint::from(budget.quantified_bits.min(63)) {
        return Ok(Verdict::ResourceExceeded {
            reason: format!(
                "quantified variables need {total} bits, budget is {}",
                budget.quantified_bits
            ),
        });
    }
    let widest = phi.max_width().unwrap_or_else(|| Width::of(1));
    if widest > Width::of(budget.width_cap as u64) {
        return Ok(Verdict::ResourceExceeded {
            reason: format!("a {widest}-bit term exceeds the width cap of {}", budget.width_cap),
        });
    }

    let limits = EvalLimits { width_cap: budget.width_cap };
    if u128::fits(widest.to_usize().unwrap_or(usize::MAX)) {
        expand::<u128>(phi, limits)
    } else {
        expand::<BigUint>(phi, limits)
    }
}

fn expand<W: BitWord>(phi: &BvFormula, limits: EvalLimits) -> Result<Verdict<BvWitness>, SolveError> {
    let mut block = Vec::new();
    let mut rest = phi;
    while let BvFormula::Quant(Quantifier::Exists, v, body) = rest {
        block.push(v);
        rest = body;
    }
    let mut solver = Expander::<W> { scope: Vec::new(), limits };
    Ok(match solver.first_witness(&block, rest)? {
        Some(values) => Verdict::Sat {
            witness: block
                .into_iter()
                .zip(values)
                .map(|(v, value)| {
                    let wide = BvValue::from_biguint(value.width(), &value.to_biguint());
                    (v.clone(), wide)
                })
                .collect(),
        },
        None => Verdict::Unsat,
    })
}

struct Expander<W> {
    scope: Vec<(String, BvValue<W>)>,
    limits: EvalLimits,
}

impl<W: BitWord> Expander<W> {
    fn holds(&mut self, phi: &BvFormula) -> Result<bool, BvEvalError> {
        match phi {
            BvFormula::Atom(p, a, b) => {
                let a = eval_term::<W, _>(a, self.scope.as_slice(), &self.limits)?;
                let b = eval_term::<W, _>(b, self.scope.as_slice(), &self.limits)?;
                if a.width() != b.width() {
                    return Err(BvEvalError::IllSorted(format!("operands of `{}` differ in width", p.symbol())));
                }
                Ok(compare(*p, &a, &b))
            }
            BvFormula::And(a, b) => Ok(self.holds(a)? && self.holds(b)?),
            BvFormula::Or(a, b) => Ok(self.holds(a)? || self.holds(b)?),
            BvFormula::Not(a) => Ok(!self.holds(a)?),
            BvFormula::Quant(q, v, body) => {
                let want = *q == Quantifier::Exists;
                let n = resolve_width::<W>(&v.width, &self.limits)?;
                for k in 0..1u64 << n {
                    self.scope.push((v.name.clone(), BvValue::from_u64(n, k)));
                    let r = self.holds(body);
                    self.scope.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
        }
    }

    fn first_witness(&mut self, block: &[&BvVar], rest: &BvFormula) -> Result<Option<Vec<BvValue<W>>>, BvEvalError> {
        let Some((v, tail)) = block.split_first() else {
            return Ok(self.holds(rest)?.then(Vec::new));
        };
        let n = resolve_width::<W>(&v.width, &self.limits)?;
        for k in 0..1u64 << n {
            self.scope.push((v.name.clone(), BvValue::from_u64(n, k)));
            let found = self.first_witness(tail, rest);
            let (_, value) = self.scope.pop().expect("pushed above");
            if let Some(mut values) = found? {
                values.insert(0, value);
                return Ok(Some(values));
            }
        }
        Ok(None)
    }
}
