//! Dynamic indexing in terms of shift and extract: `t[s] = extract(t >> s, 0, 0)`.

use super::sort::{SortError, SortErrorKind};
use super::{BinOp, BvFormula, BvTerm};

/// Builds `extract(t >> s, 0, 0)`, checking that `t` and `s` share a width.
pub fn lower_index(t: BvTerm, s: BvTerm) -> Result<BvTerm, SortError> {
    let (wt, ws) = (t.width(), s.width());
    if wt != ws {
        return Err(SortError {
            path: Vec::new(),
            kind: SortErrorKind::WidthMismatch { op: "index".into(), left: wt, right: ws },
        });
    }
    Ok(shift_extract(t, s))
}

fn shift_extract(t: BvTerm, s: BvTerm) -> BvTerm {
    BvTerm::extract(BvTerm::binary(BinOp::Lshr, t, s), 0, 0)
}

/// Replaces every `Index` node in a term, innermost first.
pub fn lower_indexing_term(t: &BvTerm) -> BvTerm {
    match t {
        BvTerm::Const { .. } | BvTerm::Var(_) => t.clone(),
        BvTerm::Not(a) => BvTerm::not(lower_indexing_term(a)),
        BvTerm::Binary(op, a, b) => BvTerm::binary(*op, lower_indexing_term(a), lower_indexing_term(b)),
        BvTerm::Concat(a, b) => BvTerm::concat(lower_indexing_term(a), lower_indexing_term(b)),
        BvTerm::Extract { term, hi, lo } => BvTerm::Extract {
            term: Box::new(lower_indexing_term(term)),
            hi: hi.clone(),
            lo: lo.clone(),
        },
        BvTerm::Index { term, index } => {
            shift_extract(lower_indexing_term(term), lower_indexing_term(index))
        }
    }
}

/// Replaces every `Index` node in a formula.
pub fn lower_indexing(phi: &BvFormula) -> BvFormula {
    match phi {
        BvFormula::Atom(p, a, b) => BvFormula::Atom(*p, lower_indexing_term(a), lower_indexing_term(b)),
        BvFormula::And(a, b) => BvFormula::and(lower_indexing(a), lower_indexing(b)),
        BvFormula::Or(a, b) => BvFormula::or(lower_indexing(a), lower_indexing(b)),
        BvFormula::Not(a) => BvFormula::not(lower_indexing(a)),
        BvFormula::Quant(q, v, body) => BvFormula::Quant(*q, v.clone(), Box::new(lower_indexing(body))),
    }
}
