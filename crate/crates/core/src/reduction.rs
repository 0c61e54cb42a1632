//! Compilation of closed prenex SO2 formulas into equisatisfiable BV2 formulas.
//!
//! Each function symbol `f` of arity `n` becomes a variable `x_f` of width
//! `2^n` holding its truth table: bit `Σ 2^i · b_i` of `x_f` is
//! `f(b_{n-1}, ..., b_0)`. The matrix compiles to a 1-bit term:
//!
//! | SO2                      | BV2                                                   |
//! |--------------------------|-------------------------------------------------------|
//! | `a & b`                  | `a & b`                                               |
//! | `!a`                     | `~a`                                                  |
//! | `0`, `1`                 | `0^[1]`, `1^[1]`                                      |
//! | `p()`                    | `x_p^[1]`                                             |
//! | `f(r_{n-1}, ..., r_0)`   | `x_f^[2^n][0^[2^n - n] · r_{n-1} · ... · r_0]`        |
//!
//! and the result is the translated prefix over `matrix = 1^[1]`. The leftmost
//! argument supplies the most significant index bit. Index nodes are kept as
//! such; [`crate::bv::lower_indexing`] rewrites them to shifts.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::bv::word::BitWord;
use crate::bv::{Assignment, BvFormula, BvTerm, BvValue, BvVar, Width};
use crate::so2::{validate_prenex_closed, FunctionSymbol, Interpretation, So2Formula, ValidateOptions, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("symbol `{0}` has no bit-vector variable")]
    MissingSymbol(String),
    #[error("symbol `{name}` is applied to {found} argument(s) but has arity {arity}")]
    ArityMismatch { name: String, arity: u32, found: usize },
    #[error("quantifier over `{0}` inside the matrix")]
    QuantifierInMatrix(String),
    #[error("input is not a closed prenex formula: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("table for `{name}` has {found} entries, expected {expected}")]
    TableMismatch { name: String, expected: String, found: usize },
    #[error("a {0}-bit variable does not fit the selected word type")]
    TooWide(Width),
}

/// Bit-vector variable standing for each function symbol.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolMap {
    entries: BTreeMap<String, BvVar>,
}

impl SymbolMap {
    /// Names each symbol `x_<name>`, appending `_1`, `_2`, ... when that name
    /// is in `reserved` or already taken. A symbol listed twice keeps its first
    /// entry.
    pub fn build<'a>(
        symbols: impl IntoIterator<Item = &'a FunctionSymbol>,
        reserved: &BTreeSet<String>,
    ) -> Self {
        let mut taken = reserved.clone();
        let mut entries = BTreeMap::new();
        for sym in symbols {
            if entries.contains_key(&sym.name) {
                continue;
            }
            let base = format!("x_{}", sym.name);
            let mut name = base.clone();
            let mut k = 1usize;
            while taken.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            taken.insert(name.clone());
            entries.insert(sym.name.clone(), BvVar::new(name, Width::pow2(sym.arity)));
        }
        Self { entries }
    }

    /// Map for every symbol of an interpretation, arity taken from the table.
    pub fn for_interpretation(interp: &Interpretation) -> Self {
        let symbols: Vec<FunctionSymbol> = interp
            .iter()
            .map(|(name, table)| FunctionSymbol::new(name.clone(), table.arity()))
            .collect();
        Self::build(&symbols, &BTreeSet::new())
    }

    pub fn get(&self, symbol: &str) -> Option<&BvVar> {
        self.entries.get(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BvVar)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Compiles a quantifier-free SO2 formula to a 1-bit term.
pub fn reduce_matrix(psi: &So2Formula, map: &SymbolMap) -> Result<BvTerm, ReductionError> {
    match psi {
        So2Formula::Lit(b) => Ok(BvTerm::constant(u64::from(*b), 1)),
        So2Formula::And(a, b) => Ok(BvTerm::and(reduce_matrix(a, map)?, reduce_matrix(b, map)?)),
        So2Formula::Not(a) => Ok(BvTerm::not(reduce_matrix(a, map)?)),
        So2Formula::Apply(sym, args) => {
            let var = map
                .get(&sym.name)
                .ok_or_else(|| ReductionError::MissingSymbol(sym.name.clone()))?;
            if args.len() != sym.arity as usize || var.width != Width::pow2(sym.arity) {
                return Err(ReductionError::ArityMismatch {
                    name: sym.name.clone(),
                    arity: sym.arity,
                    found: args.len(),
                });
            }
            let table = BvTerm::Var(var.clone());
            if args.is_empty() {
                return Ok(table);
            }
            // 2^n - n ≥ 1 for every n ≥ 1
            let pad = BigUint::one() << sym.arity;
            let pad = Width::new(pad - sym.arity).expect("padding is positive");
            let mut index = BvTerm::Const { value: BigUint::from(0u32), width: pad };
            for arg in args {
                index = BvTerm::concat(index, reduce_matrix(arg, map)?);
            }
            Ok(BvTerm::index(table, index))
        }
        So2Formula::Quant(_, sym, _) => Err(ReductionError::QuantifierInMatrix(sym.name.clone())),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReduceOptions {
    /// Accept prefixes that quantify a proposition before a proper function.
    pub relax_order: bool,
}

/// Result of [`reduce_so2_to_bv2`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub formula: BvFormula,
    pub symbols: SymbolMap,
}

/// Compiles a closed prenex SO2 formula into an equisatisfiable closed BV2
/// formula, preserving quantifier order and polarity.
pub fn reduce_so2_to_bv2(phi: &So2Formula, options: ReduceOptions) -> Result<Reduction, ReductionError> {
    let diag = validate_prenex_closed(phi, ValidateOptions { relax_order: options.relax_order });
    if !diag.is_ok() {
        return Err(ReductionError::Invalid(diag.errors));
    }
    let (prefix, matrix) = phi.split_prefix();
    let symbols = SymbolMap::build(prefix.iter().map(|(_, s)| *s), &BTreeSet::new());
    let body = BvFormula::eq(reduce_matrix(matrix, &symbols)?, BvTerm::constant(1, 1));
    let bv_prefix = prefix
        .iter()
        .map(|(q, s)| (*q, symbols.get(&s.name).expect("every binder is mapped").clone()))
        .collect();
    Ok(Reduction { formula: BvFormula::with_prefix(bv_prefix, body), symbols })
}

/// Turns an interpretation into the matching assignment: bit `k` of `x_f` is
/// entry `k` of `f`'s table.
pub fn interp_to_assignment<W: BitWord>(
    interp: &Interpretation,
    map: &SymbolMap,
) -> Result<Assignment<W>, ReductionError> {
    let mut out = Assignment::new();
    for (name, var) in map.iter() {
        let table = interp
            .get(name)
            .ok_or_else(|| ReductionError::MissingSymbol(name.clone()))?;
        let width = var.width.to_usize().filter(|&w| W::fits(w));
        let Some(width) = width else {
            return Err(ReductionError::TooWide(var.width.clone()));
        };
        if table.len() != width {
            return Err(ReductionError::TableMismatch {
                name: name.clone(),
                expected: var.width.to_string(),
                found: table.len(),
            });
        }
        out.insert(var.name.clone(), BvValue::from_bits(table.bits()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so2::{parse_so2, TruthTable};

    fn map_of(symbols: &[(&str, u32)]) -> SymbolMap {
        let syms: Vec<_> = symbols.iter().map(|(n, a)| FunctionSymbol::new(*n, *a)).collect();
        SymbolMap::build(&syms, &BTreeSet::new())
    }

    #[test]
    fn proposition_and_negation() {
        let m = map_of(&[("f", 0), ("g", 0)]);
        assert_eq!(reduce_matrix(&So2Formula::prop("f"), &m).unwrap(), BvTerm::var("x_f", 1));
        assert_eq!(
            reduce_matrix(&So2Formula::not(So2Formula::prop("g")), &m).unwrap(),
            BvTerm::not(BvTerm::var("x_g", 1))
        );
    }

    #[test]
    fn literals_become_one_bit_constants() {
        let m = SymbolMap::default();
        assert_eq!(reduce_matrix(&So2Formula::Lit(true), &m).unwrap(), BvTerm::constant(1, 1));
        assert_eq!(reduce_matrix(&So2Formula::Lit(false), &m).unwrap(), BvTerm::constant(0, 1));
    }

    #[test]
    fn unary_application_pads_one_bit() {
        let m = map_of(&[("g", 1), ("p", 0)]);
        let psi = So2Formula::apply(FunctionSymbol::new("g", 1), vec![So2Formula::prop("p")]);
        let expected = BvTerm::index(
            BvTerm::var("x_g", 2),
            BvTerm::concat(BvTerm::constant(0, 1), BvTerm::var("x_p", 1)),
        );
        assert_eq!(reduce_matrix(&psi, &m).unwrap(), expected);
    }

    #[test]
    fn proposition_prefix() {
        let r = reduce_so2_to_bv2(&parse_so2("exists p:0 . p()").unwrap(), ReduceOptions::default()).unwrap();
        let expected = BvFormula::exists(
            BvVar::new("x_p", Width::of(1)),
            BvFormula::eq(BvTerm::var("x_p", 1), BvTerm::constant(1, 1)),
        );
        assert_eq!(r.formula, expected);
        let r = reduce_so2_to_bv2(&parse_so2("forall p:0 . p()").unwrap(), ReduceOptions::default()).unwrap();
        assert_eq!(r.formula, expected_forall());
    }

    fn expected_forall() -> BvFormula {
        BvFormula::forall(
            BvVar::new("x_p", Width::of(1)),
            BvFormula::eq(BvTerm::var("x_p", 1), BvTerm::constant(1, 1)),
        )
    }

    #[test]
    fn names_avoid_collisions() {
        let syms = [FunctionSymbol::new("f", 1), FunctionSymbol::new("g", 0)];
        let reserved: BTreeSet<String> = ["x_f".to_string(), "x_f_1".to_string()].into();
        let m = SymbolMap::build(&syms, &reserved);
        assert_eq!(m.get("f").unwrap().name, "x_f_2");
        assert_eq!(m.get("g").unwrap().name, "x_g");
    }

    #[test]
    fn assignment_copies_table_bits() {
        let mut interp = Interpretation::new();
        interp.insert("f".into(), TruthTable::from_msb_str(3, "10010110").unwrap());
        interp.insert("p".into(), TruthTable::from_msb_str(0, "1").unwrap());
        interp.insert("h".into(), TruthTable::from_msb_str(1, "10").unwrap());
        let m = SymbolMap::for_interpretation(&interp);
        let a = interp_to_assignment::<u128>(&interp, &m).unwrap();
        assert_eq!(*a["x_f"].word(), 0b10010110);
        assert!(a["x_f"].bit(7));
        assert_eq!(a["x_p"], BvValue::from_u64(1, 1));
        assert_eq!(*a["x_h"].word(), 0b10);
        assert!(!a["x_h"].bit(0));
    }

    #[test]
    fn huge_arity_reduces_without_evaluation() {
        let phi = parse_so2("exists f:64 . f(1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1)").unwrap();
        let r = reduce_so2_to_bv2(&phi, ReduceOptions::default()).unwrap();
        crate::bv::check_sorts(&r.formula).unwrap();
        let (prefix, _) = r.formula.split_prefix();
        assert_eq!(prefix[0].1.width, Width::pow2(64));
    }

    #[test]
    fn rejects_invalid_input() {
        let phi = parse_so2("forall p:0 . exists f:1 . f(p)").unwrap();
        assert!(matches!(
            reduce_so2_to_bv2(&phi, ReduceOptions::default()),
            Err(ReductionError::Invalid(_))
        ));
        assert!(reduce_so2_to_bv2(&phi, ReduceOptions { relax_order: true }).is_ok());
    }
}
