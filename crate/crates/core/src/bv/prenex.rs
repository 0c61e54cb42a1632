use std::collections::BTreeSet;

use super::{BvFormula, BvTerm, BvVar};
use crate::Quantifier;

/// Renames bound variables so that no two binders share a name and no binder
/// reuses the name of a free variable. The first binder of each name keeps it;
/// later ones become `name_1`, `name_2`, ...
pub fn rename_apart(phi: &BvFormula) -> BvFormula {
    let mut used = phi.all_names();
    let mut claimed: BTreeSet<String> = phi.free_vars().into_keys().collect();
    let mut scope = Vec::new();
    rename(phi, &mut used, &mut claimed, &mut scope)
}

fn fresh(base: &str, used: &mut BTreeSet<String>) -> String {
    let mut k = 1usize;
    loop {
        let candidate = format!("{base}_{k}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
        k += 1;
    }
}

fn rename(
    phi: &BvFormula,
    used: &mut BTreeSet<String>,
    claimed: &mut BTreeSet<String>,
    scope: &mut Vec<(String, String)>,
) -> BvFormula {
    match phi {
        BvFormula::Atom(p, a, b) => BvFormula::Atom(*p, subst(a, scope), subst(b, scope)),
        BvFormula::And(a, b) => BvFormula::and(rename(a, used, claimed, scope), rename(b, used, claimed, scope)),
        BvFormula::Or(a, b) => BvFormula::or(rename(a, used, claimed, scope), rename(b, used, claimed, scope)),
        BvFormula::Not(a) => BvFormula::not(rename(a, used, claimed, scope)),
        BvFormula::Quant(q, v, body) => {
            let name = if claimed.insert(v.name.clone()) {
                v.name.clone()
            } else {
                let n = fresh(&v.name, used);
                claimed.insert(n.clone());
                n
            };
            scope.push((v.name.clone(), name.clone()));
            let body = rename(body, used, claimed, scope);
            scope.pop();
            BvFormula::Quant(*q, BvVar::new(name, v.width.clone()), Box::new(body))
        }
    }
}

fn subst(t: &BvTerm, scope: &[(String, String)]) -> BvTerm {
    match t {
        BvTerm::Const { .. } => t.clone(),
        BvTerm::Var(v) => match scope.iter().rev().find(|(old, _)| *old == v.name) {
            Some((_, new)) => BvTerm::Var(BvVar::new(new.clone(), v.width.clone())),
            None => t.clone(),
        },
        BvTerm::Not(a) => BvTerm::not(subst(a, scope)),
        BvTerm::Binary(op, a, b) => BvTerm::binary(*op, subst(a, scope), subst(b, scope)),
        BvTerm::Concat(a, b) => BvTerm::concat(subst(a, scope), subst(b, scope)),
        BvTerm::Extract { term, hi, lo } => BvTerm::Extract {
            term: Box::new(subst(term, scope)),
            hi: hi.clone(),
            lo: lo.clone(),
        },
        BvTerm::Index { term, index } => BvTerm::index(subst(term, scope), subst(index, scope)),
    }
}

/// Converts to an equivalent prenex formula.
///
/// Binders are first renamed apart, then hoisted left to right; a quantifier
/// under a negation is dualized. The matrix keeps the original connective
/// structure, so the result is at most linearly larger.
pub fn prenex_bv(phi: &BvFormula) -> BvFormula {
    let renamed = rename_apart(phi);
    let (prefix, matrix) = hoist(renamed);
    BvFormula::with_prefix(prefix, matrix)
}

fn hoist(phi: BvFormula) -> (Vec<(Quantifier, BvVar)>, BvFormula) {
    match phi {
        BvFormula::Atom(..) => (Vec::new(), phi),
        BvFormula::And(a, b) => {
            let (mut pa, ma) = hoist(*a);
            let (pb, mb) = hoist(*b);
            pa.extend(pb);
            (pa, BvFormula::and(ma, mb))
        }
        BvFormula::Or(a, b) => {
            let (mut pa, ma) = hoist(*a);
            let (pb, mb) = hoist(*b);
            pa.extend(pb);
            (pa, BvFormula::or(ma, mb))
        }
        BvFormula::Not(a) => {
            let (p, m) = hoist(*a);
            let p = p.into_iter().map(|(q, v)| (q.dual(), v)).collect();
            (p, BvFormula::not(m))
        }
        BvFormula::Quant(q, v, body) => {
            let (p, m) = hoist(*body);
            let mut prefix = Vec::with_capacity(p.len() + 1);
            prefix.push((q, v));
            prefix.extend(p);
            (prefix, m)
        }
    }
}
