//! Quantified bit-vector formulas with binary-encoded scalars.
//!
//! Widths, constants and extraction bounds are arbitrary-precision naturals,
//! so sorts like `2^1000` can be built, sort-checked and measured. Only
//! evaluation and solving require widths under a configurable cap.

mod eval;
mod lower;
mod prenex;
mod size;
mod solve;
mod sort;
mod value;
pub mod word;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::Quantifier;

pub use eval::{eval_formula, eval_term, BvEvalError, Env, EvalLimits};
pub use lower::{lower_index, lower_indexing, lower_indexing_term};
pub use prenex::{prenex_bv, rename_apart};
pub use size::{formula_size, scalar_length, scalar_length_u64, term_size};
pub use solve::{solve_bv2, BvWitness, SolveBudget, SolveError};
pub use sort::{check_sorts, check_term, SortError, SortErrorKind, SortInfo};
pub use value::{Assignment, BvValue};

/// A bit-width: a natural number ≥ 1 of any magnitude.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Width(BigUint);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("bit-width must be at least 1")]
pub struct ZeroWidth;

impl Width {
    pub fn new(n: BigUint) -> Result<Self, ZeroWidth> {
        if n.is_zero() {
            Err(ZeroWidth)
        } else {
            Ok(Width(n))
        }
    }

    /// Width from a machine integer. Panics on zero.
    pub fn of(n: u64) -> Self {
        Self::new(BigUint::from(n)).expect("nonzero width")
    }

    /// `2^exp`.
    pub fn pow2(exp: u32) -> Self {
        Width(BigUint::one() << exp)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.0.to_usize()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Sum of two widths, the width of a concatenation.
    pub fn plus(&self, other: &Width) -> Width {
        Width(&self.0 + &other.0)
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for Width {
    /// Panics on zero.
    fn from(n: u32) -> Self {
        Width::of(u64::from(n))
    }
}

/// A sorted bit-vector variable `name^[width]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BvVar {
    pub name: String,
    pub width: Width,
}

impl BvVar {
    pub fn new(name: impl Into<String>, width: Width) -> Self {
        Self { name: name.into(), width }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Mul,
    Udiv,
    And,
    Or,
    Xor,
    Shl,
    Lshr,
}

impl BinOp {
    pub const ALL: [BinOp; 8] = [
        BinOp::Add,
        BinOp::Mul,
        BinOp::Udiv,
        BinOp::And,
        BinOp::Or,
        BinOp::Xor,
        BinOp::Shl,
        BinOp::Lshr,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Mul => "*",
            BinOp::Udiv => "/",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "^",
            BinOp::Shl => "<<",
            BinOp::Lshr => ">>",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pred {
    Eq,
    /// Unsigned `≤`.
    Ule,
    /// Two's-complement `≤`.
    Sle,
}

impl Pred {
    pub const ALL: [Pred; 3] = [Pred::Eq, Pred::Ule, Pred::Sle];

    pub fn symbol(self) -> &'static str {
        match self {
            Pred::Eq => "=",
            Pred::Ule => "<=u",
            Pred::Sle => "<=s",
        }
    }
}

/// Bit-vector terms. Widths are derived from the leaves; see [`check_term`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BvTerm {
    Const { value: BigUint, width: Width },
    Var(BvVar),
    Not(Box<BvTerm>),
    Binary(BinOp, Box<BvTerm>, Box<BvTerm>),
    /// The first operand supplies the most significant bits.
    Concat(Box<BvTerm>, Box<BvTerm>),
    /// Bits `hi` down to `lo`, inclusive.
    Extract { term: Box<BvTerm>, hi: BigUint, lo: BigUint },
    /// Bit `index` of `term`, zero when `index ≥ width`. Both operands share a
    /// width and the result has width 1.
    Index { term: Box<BvTerm>, index: Box<BvTerm> },
}

impl BvTerm {
    pub fn constant(value: u64, width: u64) -> Self {
        BvTerm::Const { value: BigUint::from(value), width: Width::of(width) }
    }

    pub fn constant_big(value: BigUint, width: Width) -> Self {
        BvTerm::Const { value, width }
    }

    pub fn var(name: impl Into<String>, width: u64) -> Self {
        BvTerm::Var(BvVar::new(name, Width::of(width)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: BvTerm) -> Self {
        BvTerm::Not(Box::new(t))
    }

    pub fn binary(op: BinOp, a: BvTerm, b: BvTerm) -> Self {
        BvTerm::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn and(a: BvTerm, b: BvTerm) -> Self {
        Self::binary(BinOp::And, a, b)
    }

    pub fn concat(hi: BvTerm, lo: BvTerm) -> Self {
        BvTerm::Concat(Box::new(hi), Box::new(lo))
    }

    pub fn extract(t: BvTerm, hi: u64, lo: u64) -> Self {
        BvTerm::Extract { term: Box::new(t), hi: BigUint::from(hi), lo: BigUint::from(lo) }
    }

    pub fn index(t: BvTerm, index: BvTerm) -> Self {
        BvTerm::Index { term: Box::new(t), index: Box::new(index) }
    }

    /// Derived width, assuming the term is well-sorted.
    pub fn width(&self) -> Width {
        match self {
            BvTerm::Const { width, .. } => width.clone(),
            BvTerm::Var(v) => v.width.clone(),
            BvTerm::Not(t) => t.width(),
            BvTerm::Binary(_, a, _) => a.width(),
            BvTerm::Concat(a, b) => a.width().plus(&b.width()),
            // ill-sorted bounds fall back to width 1; check_term reports them
            BvTerm::Extract { hi, lo, .. } if lo <= hi => Width(hi + 1u32 - lo),
            BvTerm::Extract { .. } => Width::of(1),
            BvTerm::Index { .. } => Width::of(1),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a BvVar>) {
        match self {
            BvTerm::Const { .. } => {}
            BvTerm::Var(v) => out.push(v),
            BvTerm::Not(t) | BvTerm::Extract { term: t, .. } => t.collect_vars(out),
            BvTerm::Binary(_, a, b) | BvTerm::Concat(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            BvTerm::Index { term, index } => {
                term.collect_vars(out);
                index.collect_vars(out);
            }
        }
    }

    fn for_each_child(&self, f: &mut impl FnMut(&BvTerm)) {
        match self {
            BvTerm::Const { .. } | BvTerm::Var(_) => {}
            BvTerm::Not(t) | BvTerm::Extract { term: t, .. } => f(t),
            BvTerm::Binary(_, a, b) | BvTerm::Concat(a, b) => {
                f(a);
                f(b);
            }
            BvTerm::Index { term, index } => {
                f(term);
                f(index);
            }
        }
    }

    /// True if an `Index` node occurs anywhere in the term.
    pub fn has_index(&self) -> bool {
        if matches!(self, BvTerm::Index { .. }) {
            return true;
        }
        let mut found = false;
        self.for_each_child(&mut |c| found |= c.has_index());
        found
    }

    /// Largest width of any node, assuming the term is well-sorted.
    pub fn max_width(&self) -> Width {
        let mut best = self.width();
        self.for_each_child(&mut |c| {
            let w = c.max_width();
            if w > best {
                best = w;
            }
        });
        best
    }
}

/// Bit-vector formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BvFormula {
    Atom(Pred, BvTerm, BvTerm),
    And(Box<BvFormula>, Box<BvFormula>),
    Or(Box<BvFormula>, Box<BvFormula>),
    Not(Box<BvFormula>),
    Quant(Quantifier, BvVar, Box<BvFormula>),
}

impl BvFormula {
    pub fn eq(a: BvTerm, b: BvTerm) -> Self {
        BvFormula::Atom(Pred::Eq, a, b)
    }

    pub fn ule(a: BvTerm, b: BvTerm) -> Self {
        BvFormula::Atom(Pred::Ule, a, b)
    }

    pub fn sle(a: BvTerm, b: BvTerm) -> Self {
        BvFormula::Atom(Pred::Sle, a, b)
    }

    pub fn and(a: BvFormula, b: BvFormula) -> Self {
        BvFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BvFormula, b: BvFormula) -> Self {
        BvFormula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: BvFormula) -> Self {
        BvFormula::Not(Box::new(a))
    }

    pub fn exists(v: BvVar, body: BvFormula) -> Self {
        BvFormula::Quant(Quantifier::Exists, v, Box::new(body))
    }

    pub fn forall(v: BvVar, body: BvFormula) -> Self {
        BvFormula::Quant(Quantifier::Forall, v, Box::new(body))
    }

    /// Wraps `matrix` in the given quantifier prefix, outermost first.
    pub fn with_prefix(prefix: Vec<(Quantifier, BvVar)>, matrix: BvFormula) -> Self {
        prefix
            .into_iter()
            .rev()
            .fold(matrix, |body, (q, v)| BvFormula::Quant(q, v, Box::new(body)))
    }

    pub fn split_prefix(&self) -> (Vec<(Quantifier, &BvVar)>, &BvFormula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        while let BvFormula::Quant(q, v, body) = cur {
            prefix.push((*q, v));
            cur = body;
        }
        (prefix, cur)
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            BvFormula::Atom(..) => true,
            BvFormula::And(a, b) | BvFormula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            BvFormula::Not(a) => a.is_quantifier_free(),
            BvFormula::Quant(..) => false,
        }
    }

    pub fn is_prenex(&self) -> bool {
        self.split_prefix().1.is_quantifier_free()
    }

    /// Every quantified variable, in preorder.
    pub fn bound_vars(&self) -> Vec<&BvVar> {
        let mut out = Vec::new();
        self.walk_binders(&mut |v| out.push(v));
        out
    }

    fn walk_binders<'a>(&'a self, f: &mut impl FnMut(&'a BvVar)) {
        match self {
            BvFormula::Atom(..) => {}
            BvFormula::And(a, b) | BvFormula::Or(a, b) => {
                a.walk_binders(f);
                b.walk_binders(f);
            }
            BvFormula::Not(a) => a.walk_binders(f),
            BvFormula::Quant(_, v, body) => {
                f(v);
                body.walk_binders(f);
            }
        }
    }

    /// Variables occurring free, with the width of their first occurrence.
    pub fn free_vars(&self) -> BTreeMap<String, Width> {
        let mut out = BTreeMap::new();
        let mut scope = Vec::new();
        self.collect_free(&mut scope, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, scope: &mut Vec<&'a str>, out: &mut BTreeMap<String, Width>) {
        match self {
            BvFormula::Atom(_, a, b) => {
                let mut vars = Vec::new();
                a.collect_vars(&mut vars);
                b.collect_vars(&mut vars);
                for v in vars {
                    if !scope.contains(&v.name.as_str()) {
                        out.entry(v.name.clone()).or_insert_with(|| v.width.clone());
                    }
                }
            }
            BvFormula::And(a, b) | BvFormula::Or(a, b) => {
                a.collect_free(scope, out);
                b.collect_free(scope, out);
            }
            BvFormula::Not(a) => a.collect_free(scope, out),
            BvFormula::Quant(_, v, body) => {
                scope.push(&v.name);
                body.collect_free(scope, out);
                scope.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.free_vars().into_keys().collect();
        self.walk_binders(&mut |v| {
            out.insert(v.name.clone());
        });
        out
    }

    /// Prefix with every quantifier swapped over the negated matrix.
    pub fn dualize(&self) -> BvFormula {
        let (prefix, matrix) = self.split_prefix();
        let prefix = prefix.into_iter().map(|(q, v)| (q.dual(), v.clone())).collect();
        BvFormula::with_prefix(prefix, BvFormula::not(matrix.clone()))
    }

    pub fn has_index(&self) -> bool {
        match self {
            BvFormula::Atom(_, a, b) => a.has_index() || b.has_index(),
            BvFormula::And(a, b) | BvFormula::Or(a, b) => a.has_index() || b.has_index(),
            BvFormula::Not(a) | BvFormula::Quant(_, _, a) => a.has_index(),
        }
    }

    /// Largest width of any term node, assuming well-sortedness.
    pub fn max_width(&self) -> Option<Width> {
        match self {
            BvFormula::Atom(_, a, b) => Some(a.max_width().max(b.max_width())),
            BvFormula::And(a, b) | BvFormula::Or(a, b) => a.max_width().max(b.max_width()),
            BvFormula::Not(a) => a.max_width(),
            BvFormula::Quant(_, v, body) => Some(match body.max_width() {
                Some(w) => w.max(v.width.clone()),
                None => v.width.clone(),
            }),
        }
    }
}

/// Structural equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &BvFormula, b: &BvFormula) -> bool {
    alpha_formula(a, b, &mut Vec::new())
}

fn alpha_formula<'a>(a: &'a BvFormula, b: &'a BvFormula, scope: &mut Vec<(&'a BvVar, &'a BvVar)>) -> bool {
    match (a, b) {
        (BvFormula::Atom(p, a1, a2), BvFormula::Atom(q, b1, b2)) => {
            p == q && alpha_term(a1, b1, scope) && alpha_term(a2, b2, scope)
        }
        (BvFormula::And(a1, a2), BvFormula::And(b1, b2))
        | (BvFormula::Or(a1, a2), BvFormula::Or(b1, b2)) => {
            alpha_formula(a1, b1, scope) && alpha_formula(a2, b2, scope)
        }
        (BvFormula::Not(a1), BvFormula::Not(b1)) => alpha_formula(a1, b1, scope),
        (BvFormula::Quant(qa, va, ba), BvFormula::Quant(qb, vb, bb)) => {
            if qa != qb || va.width != vb.width {
                return false;
            }
            scope.push((va, vb));
            let ok = alpha_formula(ba, bb, scope);
            scope.pop();
            ok
        }
        _ => false,
    }
}

fn alpha_term(a: &BvTerm, b: &BvTerm, scope: &[(&BvVar, &BvVar)]) -> bool {
    match (a, b) {
        (BvTerm::Const { value: va, width: wa }, BvTerm::Const { value: vb, width: wb }) => {
            va == vb && wa == wb
        }
        (BvTerm::Var(x), BvTerm::Var(y)) => {
            if x.width != y.width {
                return false;
            }
            let bx = scope.iter().rev().position(|(l, _)| l.name == x.name);
            let by = scope.iter().rev().position(|(_, r)| r.name == y.name);
            match (bx, by) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x.name == y.name,
                _ => false,
            }
        }
        (BvTerm::Not(x), BvTerm::Not(y)) => alpha_term(x, y, scope),
        (BvTerm::Binary(o1, a1, a2), BvTerm::Binary(o2, b1, b2)) => {
            o1 == o2 && alpha_term(a1, b1, scope) && alpha_term(a2, b2, scope)
        }
        (BvTerm::Concat(a1, a2), BvTerm::Concat(b1, b2)) => {
            alpha_term(a1, b1, scope) && alpha_term(a2, b2, scope)
        }
        (
            BvTerm::Extract { term: ta, hi: ha, lo: la },
            BvTerm::Extract { term: tb, hi: hb, lo: lb },
        ) => ha == hb && la == lb && alpha_term(ta, tb, scope),
        (BvTerm::Index { term: ta, index: ia }, BvTerm::Index { term: tb, index: ib }) => {
            alpha_term(ta, tb, scope) && alpha_term(ia, ib, scope)
        }
        _ => false,
    }
}

impl fmt::Display for BvTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BvTerm::Const { value, width } => write!(f, "{value}^[{width}]"),
            BvTerm::Var(v) => f.write_str(&v.name),
            BvTerm::Not(t) => write!(f, "~{t}"),
            BvTerm::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            BvTerm::Concat(a, b) => write!(f, "({a} . {b})"),
            BvTerm::Extract { term, hi, lo } => write!(f, "{term}[{hi}:{lo}]"),
            BvTerm::Index { term, index } => write!(f, "{term}[{index}]"),
        }
    }
}

impl fmt::Display for BvFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BvFormula::Atom(p, a, b) => write!(f, "({a} {} {b})", p.symbol()),
            BvFormula::And(a, b) => write!(f, "({a} && {b})"),
            BvFormula::Or(a, b) => write!(f, "({a} || {b})"),
            BvFormula::Not(a) => write!(f, "!{a}"),
            BvFormula::Quant(q, v, body) => write!(f, "{q} {}^[{}] . {body}", v.name, v.width),
        }
    }
}
