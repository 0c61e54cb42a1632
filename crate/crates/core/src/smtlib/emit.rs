use std::fmt::Write as _;

use num_bigint::BigUint;
use thiserror::Error;

use crate::bv::{check_sorts, BinOp, BvFormula, BvTerm, BvVar, Pred, SortError, Width};
use crate::Quantifier;

/// Logic tag for quantified bit-vector formulas.
pub const LOGIC: &str = "BV";

/// Constants at most this wide print as `#b` literals; wider ones use the
/// indexed `(_ bvV W)` form so the script stays logarithmic in the width.
pub const BINARY_LITERAL_MAX_WIDTH: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("dynamic index node must be lowered before emission")]
    UnloweredIndex,
    #[error("`{0}` cannot be written as an SMT-LIB symbol")]
    InvalidName(String),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// A complete script: logic header, declarations, one assertion, `(check-sat)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedScript {
    pub text: String,
    pub logic: &'static str,
    /// Free variables, declared with `declare-const` in name order. Empty for
    /// closed formulas.
    pub declarations: Vec<BvVar>,
    /// Variables bound by the leading quantifier prefix, outermost first.
    pub binders: Vec<(Quantifier, BvVar)>,
}

const RESERVED: &[&str] = &[
    "_", "!", "as", "let", "exists", "forall", "match", "par", "and", "or", "not", "=", "=>", "xor",
    "true", "false", "ite", "distinct", "concat", "extract", "bvnot", "bvadd", "bvmul", "bvudiv",
    "bvand", "bvor", "bvxor", "bvshl", "bvlshr", "bvule", "bvsle", "BitVec", "NUMERAL", "DECIMAL",
    "STRING", "BINARY", "HEXADECIMAL",
];

pub(crate) fn is_simple_symbol(s: &str) -> bool {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || EXTRA.contains(c) => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

fn symbol(name: &str) -> Result<String, EmitError> {
    if is_simple_symbol(name) && !RESERVED.contains(&name) {
        Ok(name.to_string())
    } else if !name.is_empty() && !name.contains(['|', '\\']) {
        Ok(format!("|{name}|"))
    } else {
        Err(EmitError::InvalidName(name.to_string()))
    }
}

fn sort(w: &Width) -> String {
    format!("(_ BitVec {w})")
}

fn constant(value: &BigUint, width: &Width) -> String {
    match width.to_u64() {
        Some(n) if n <= BINARY_LITERAL_MAX_WIDTH => {
            format!("#b{:0>width$}", value.to_str_radix(2), width = n as usize)
        }
        _ => format!("(_ bv{value} {width})"),
    }
}

fn op_name(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "bvadd",
        BinOp::Mul => "bvmul",
        BinOp::Udiv => "bvudiv",
        BinOp::And => "bvand",
        BinOp::Or => "bvor",
        BinOp::Xor => "bvxor",
        BinOp::Shl => "bvshl",
        BinOp::Lshr => "bvlshr",
    }
}

fn pred_name(p: Pred) -> &'static str {
    match p {
        Pred::Eq => "=",
        Pred::Ule => "bvule",
        Pred::Sle => "bvsle",
    }
}

fn term(t: &BvTerm, out: &mut String) -> Result<(), EmitError> {
    match t {
        BvTerm::Const { value, width } => out.push_str(&constant(value, width)),
        BvTerm::Var(v) => out.push_str(&symbol(&v.name)?),
        BvTerm::Not(a) => {
            out.push_str("(bvnot ");
            term(a, out)?;
            out.push(')');
        }
        BvTerm::Binary(op, a, b) => {
            let _ = write!(out, "({} ", op_name(*op));
            term(a, out)?;
            out.push(' ');
            term(b, out)?;
            out.push(')');
        }
        BvTerm::Concat(a, b) => {
            out.push_str("(concat ");
            term(a, out)?;
            out.push(' ');
            term(b, out)?;
            out.push(')');
        }
        BvTerm::Extract { term: a, hi, lo } => {
            let _ = write!(out, "((_ extract {hi} {lo}) ");
            term(a, out)?;
            out.push(')');
        }
        BvTerm::Index { .. } => return Err(EmitError::UnloweredIndex),
    }
    Ok(())
}

fn binder(q: Quantifier, v: &BvVar) -> Result<String, EmitError> {
    Ok(format!("({} (({} {}))", q.keyword(), symbol(&v.name)?, sort(&v.width)))
}

fn inline(phi: &BvFormula, out: &mut String) -> Result<(), EmitError> {
    match phi {
        BvFormula::Atom(p, a, b) => {
            let _ = write!(out, "({} ", pred_name(*p));
            term(a, out)?;
            out.push(' ');
            term(b, out)?;
            out.push(')');
        }
        BvFormula::And(a, b) | BvFormula::Or(a, b) => {
            out.push_str(if matches!(phi, BvFormula::And(..)) { "(and " } else { "(or " });
            inline(a, out)?;
            out.push(' ');
            inline(b, out)?;
            out.push(')');
        }
        BvFormula::Not(a) => {
            out.push_str("(not ");
            inline(a, out)?;
            out.push(')');
        }
        BvFormula::Quant(q, v, body) => {
            out.push_str(&binder(*q, v)?);
            out.push(' ');
            inline(body, out)?;
            out.push(')');
        }
    }
    Ok(())
}

/// Serializes a well-sorted formula without dynamic index nodes.
///
/// The leading quantifier prefix is printed one binder per line, each level
/// indented by two spaces; the matrix goes on a single line. The same formula
/// always produces the same bytes.
pub fn emit_smt2(phi: &BvFormula) -> Result<EmittedScript, EmitError> {
    if phi.has_index() {
        return Err(EmitError::UnloweredIndex);
    }
    let info = check_sorts(phi)?;
    let declarations: Vec<BvVar> = info
        .free_vars
        .into_iter()
        .map(|(name, width)| BvVar::new(name, width))
        .collect();

    let mut text = format!("(set-logic {LOGIC})\n");
    for v in &declarations {
        let _ = writeln!(text, "(declare-const {} {})", symbol(&v.name)?, sort(&v.width));
    }
    text.push_str("(assert\n");
    let (prefix, matrix) = phi.split_prefix();
    let mut depth = 1;
    for (q, v) in &prefix {
        let _ = writeln!(text, "{}{}", "  ".repeat(depth), binder(*q, v)?);
        depth += 1;
    }
    text.push_str(&"  ".repeat(depth));
    inline(matrix, &mut text)?;
    text.push_str(&")".repeat(prefix.len() + 1));
    text.push_str("\n(check-sat)\n");

    Ok(EmittedScript {
        text,
        logic: LOGIC,
        declarations,
        binders: prefix.into_iter().map(|(q, v)| (q, v.clone())).collect(),
    })
}
