use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use super::{BvFormula, BvTerm, BvVar, Width};

/// First sort violation found, with the path from the root to the offending node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {}: {kind}", display_path(.path))]
pub struct SortError {
    pub path: Vec<String>,
    pub kind: SortErrorKind,
}

fn display_path(path: &[String]) -> String {
    if path.is_empty() {
        "<root>".to_string()
    } else {
        path.join("/")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortErrorKind {
    #[error("operands of `{op}` have widths {left} and {right}")]
    WidthMismatch { op: String, left: Width, right: Width },
    #[error("extract [{hi}:{lo}] is out of range for width {width}")]
    ExtractOutOfRange { width: Width, hi: BigUint, lo: BigUint },
    #[error("constant {value} does not fit in {width} bit(s)")]
    ConstantOutOfRange { value: BigUint, width: Width },
    #[error("variable `{name}` used with width {found}, declared with {expected}")]
    VarWidthConflict { name: String, expected: Width, found: Width },
}

/// Summary of a well-sorted formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortInfo {
    pub free_vars: BTreeMap<String, Width>,
    /// Quantified variables in preorder.
    pub bound_vars: Vec<BvVar>,
}

/// Checks a term and returns its width. Free variables must be used with a
/// single width throughout.
pub fn check_term(t: &BvTerm) -> Result<Width, SortError> {
    Checker::default().term(t)
}

/// Checks every node of `phi`: operand widths agree, constants and
/// extractions are in range, and each variable occurrence matches its binder
/// (or, for free variables, every other occurrence).
pub fn check_sorts(phi: &BvFormula) -> Result<SortInfo, SortError> {
    let mut checker = Checker::default();
    checker.formula(phi)?;
    Ok(SortInfo { free_vars: checker.free, bound_vars: checker.bound })
}

#[derive(Default)]
struct Checker {
    scope: Vec<BvVar>,
    free: BTreeMap<String, Width>,
    bound: Vec<BvVar>,
    path: Vec<String>,
}

impl Checker {
    fn fail(&self, kind: SortErrorKind) -> SortError {
        SortError { path: self.path.clone(), kind }
    }

    fn nested<T>(&mut self, label: impl fmt::Display, f: impl FnOnce(&mut Self) -> Result<T, SortError>) -> Result<T, SortError> {
        self.path.push(label.to_string());
        let r = f(self);
        if r.is_ok() {
            self.path.pop();
        }
        r
    }

    fn same(&self, op: &str, left: Width, right: Width) -> Result<Width, SortError> {
        if left == right {
            Ok(left)
        } else {
            Err(self.fail(SortErrorKind::WidthMismatch { op: op.to_string(), left, right }))
        }
    }

    fn formula(&mut self, phi: &BvFormula) -> Result<(), SortError> {
        match phi {
            BvFormula::Atom(p, a, b) => {
                let label = p.symbol();
                let wa = self.nested(format_args!("{label}[0]"), |c| c.term(a))?;
                let wb = self.nested(format_args!("{label}[1]"), |c| c.term(b))?;
                self.same(label, wa, wb).map(|_| ())
            }
            BvFormula::And(a, b) | BvFormula::Or(a, b) => {
                let label = if matches!(phi, BvFormula::And(..)) { "and" } else { "or" };
                self.nested(format_args!("{label}[0]"), |c| c.formula(a))?;
                self.nested(format_args!("{label}[1]"), |c| c.formula(b))
            }
            BvFormula::Not(a) => self.nested("not", |c| c.formula(a)),
            BvFormula::Quant(q, v, body) => {
                self.bound.push(v.clone());
                self.scope.push(v.clone());
                let r = self.nested(format_args!("{q} {}", v.name), |c| c.formula(body));
                self.scope.pop();
                r
            }
        }
    }

    fn term(&mut self, t: &BvTerm) -> Result<Width, SortError> {
        match t {
            BvTerm::Const { value, width } => {
                if value.bits() > bits_of(width) {
                    return Err(self.fail(SortErrorKind::ConstantOutOfRange {
                        value: value.clone(),
                        width: width.clone(),
                    }));
                }
                Ok(width.clone())
            }
            BvTerm::Var(v) => {
                let expected = match self.scope.iter().rev().find(|b| b.name == v.name) {
                    Some(b) => b.width.clone(),
                    None => self.free.entry(v.name.clone()).or_insert_with(|| v.width.clone()).clone(),
                };
                if expected != v.width {
                    return Err(self.fail(SortErrorKind::VarWidthConflict {
                        name: v.name.clone(),
                        expected,
                        found: v.width.clone(),
                    }));
                }
                Ok(expected)
            }
            BvTerm::Not(a) => self.nested("bvnot", |c| c.term(a)),
            BvTerm::Binary(op, a, b) => {
                let label = op.symbol();
                let wa = self.nested(format_args!("{label}[0]"), |c| c.term(a))?;
                let wb = self.nested(format_args!("{label}[1]"), |c| c.term(b))?;
                self.same(label, wa, wb)
            }
            BvTerm::Concat(a, b) => {
                let wa = self.nested("concat[0]", |c| c.term(a))?;
                let wb = self.nested("concat[1]", |c| c.term(b))?;
                Ok(wa.plus(&wb))
            }
            BvTerm::Extract { term, hi, lo } => {
                let w = self.nested("extract", |c| c.term(term))?;
                if hi < lo || hi >= w.value() {
                    return Err(self.fail(SortErrorKind::ExtractOutOfRange {
                        width: w,
                        hi: hi.clone(),
                        lo: lo.clone(),
                    }));
                }
                Ok(Width::new(hi + BigUint::one() - lo).expect("hi ≥ lo"))
            }
            BvTerm::Index { term, index } => {
                let wt = self.nested("index[0]", |c| c.term(term))?;
                let wi = self.nested("index[1]", |c| c.term(index))?;
                self.same("index", wt, wi)?;
                Ok(Width::of(1))
            }
        }
    }
}

/// Bits available in `width`, saturating for widths beyond `u64`.
fn bits_of(width: &Width) -> u64 {
    width.to_u64().unwrap_or(u64::MAX)
}
