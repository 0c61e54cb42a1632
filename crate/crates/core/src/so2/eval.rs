use thiserror::Error;

use super::{validate_prenex_closed, FunctionSymbol, Interpretation, So2Formula, TruthTable, ValidateOptions, Violation};
use crate::{Quantifier, Verdict};

/// Hard ceiling on enumerable arities: a 7-ary table has 128 entries and
/// 2^128 candidates, which no counter here can range over.
const ENUMERABLE_ARITY: u32 = 6;

/// Limits for brute-force SO2 evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct So2Config {
    /// Largest arity a quantified symbol may have.
    pub arity_cap: u32,
    /// Largest total number of truth-table bits over all quantified symbols.
    pub table_bit_budget: u64,
    /// Accept prefixes that quantify a proposition before a proper function.
    pub relax_order: bool,
}

impl Default for So2Config {
    fn default() -> Self {
        Self { arity_cap: 4, table_bit_budget: 24, relax_order: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum So2Error {
    #[error("symbol `{0}` has no interpretation")]
    MissingSymbol(String),
    #[error("symbol `{name}` is interpreted with arity {table} but applied to {found} argument(s)")]
    ArityMismatch { name: String, table: u32, found: usize },
    #[error("resource limit exceeded: {0}")]
    ResourceExceeded(String),
    #[error("formula is not closed and prenex: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Tables chosen for the outermost existential block, in prefix order.
pub type So2Witness = Vec<(FunctionSymbol, TruthTable)>;

/// Evaluates `phi` under `interp`. Quantifiers enumerate every truth table of
/// the bound symbol, inner bindings shadowing `interp`.
pub fn eval_so2(phi: &So2Formula, interp: &Interpretation, config: &So2Config) -> Result<bool, So2Error> {
    Env { base: interp, stack: Vec::new(), config }.eval(phi)
}

struct Env<'a> {
    base: &'a Interpretation,
    stack: Vec<(&'a str, TruthTable)>,
    config: &'a So2Config,
}

impl<'a> Env<'a> {
    fn lookup(&self, name: &str) -> Option<&TruthTable> {
        self.stack
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t)
            .or_else(|| self.base.get(name))
    }

    fn eval(&mut self, phi: &'a So2Formula) -> Result<bool, So2Error> {
        match phi {
            So2Formula::Lit(b) => Ok(*b),
            So2Formula::And(a, b) => Ok(self.eval(a)? && self.eval(b)?),
            So2Formula::Not(a) => Ok(!self.eval(a)?),
            So2Formula::Apply(sym, args) => {
                let mut index = 0usize;
                for arg in args {
                    index = (index << 1) | usize::from(self.eval(arg)?);
                }
                let table = self
                    .lookup(&sym.name)
                    .ok_or_else(|| So2Error::MissingSymbol(sym.name.clone()))?;
                if table.arity() as usize != args.len() {
                    return Err(So2Error::ArityMismatch {
                        name: sym.name.clone(),
                        table: table.arity(),
                        found: args.len(),
                    });
                }
                Ok(table.get(index))
            }
            So2Formula::Quant(q, sym, body) => {
                check_arity(sym, self.config)?;
                let want = *q == Quantifier::Exists;
                for index in 0..candidate_count(sym.arity) {
                    self.stack.push((&sym.name, TruthTable::from_index(sym.arity, index)));
                    let value = self.eval(body);
                    self.stack.pop();
                    if value? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
        }
    }

    /// Searches the leading existential block in enumeration order and returns
    /// the first tuple of tables under which `rest` holds.
    fn first_witness(
        &mut self,
        block: &[&'a FunctionSymbol],
        rest: &'a So2Formula,
    ) -> Result<Option<Vec<TruthTable>>, So2Error> {
        let Some((sym, tail)) = block.split_first() else {
            return Ok(self.eval(rest)?.then(Vec::new));
        };
        for index in 0..candidate_count(sym.arity) {
            let table = TruthTable::from_index(sym.arity, index);
            self.stack.push((&sym.name, table));
            let found = self.first_witness(tail, rest);
            let (_, table) = self.stack.pop().expect("pushed above");
            if let Some(mut tables) = found? {
                tables.insert(0, table);
                return Ok(Some(tables));
            }
        }
        Ok(None)
    }
}

fn candidate_count(arity: u32) -> u128 {
    debug_assert!(arity <= ENUMERABLE_ARITY);
    1u128 << (1u32 << arity)
}

fn check_arity(sym: &FunctionSymbol, config: &So2Config) -> Result<(), So2Error> {
    let cap = config.arity_cap.min(ENUMERABLE_ARITY);
    if sym.arity > cap {
        return Err(So2Error::ResourceExceeded(format!(
            "symbol `{}` has arity {}, above the cap of {cap}",
            sym.name, sym.arity
        )));
    }
    Ok(())
}

/// Decides a closed prenex formula by enumerating interpretations.
///
/// Tables are tried as unsigned integers from 0 upward, so the witness for the
/// outermost existential block is the least one in that order.
pub fn decide_so2_bruteforce(phi: &So2Formula, config: &So2Config) -> Result<Verdict<So2Witness>, So2Error> {
    let diag = validate_prenex_closed(phi, ValidateOptions { relax_order: config.relax_order });
    if !diag.is_ok() {
        return Err(So2Error::Invalid(diag.errors));
    }

    let (prefix, _) = phi.split_prefix();
    let mut total_bits: u64 = 0;
    for (_, sym) in &prefix {
        if let Err(So2Error::ResourceExceeded(reason)) = check_arity(sym, config) {
            return Ok(Verdict::ResourceExceeded { reason });
        }
        total_bits += sym.table_bits().expect("arity is capped");
    }
    if total_bits > config.table_bit_budget {
        return Ok(Verdict::ResourceExceeded {
            reason: format!(
                "quantified truth tables need {total_bits} bits, budget is {}",
                config.table_bit_budget
            ),
        });
    }

    let mut block = Vec::new();
    let mut rest = phi;
    while let So2Formula::Quant(Quantifier::Exists, sym, body) = rest {
        block.push(sym);
        rest = body;
    }

    let empty = Interpretation::new();
    let mut env = Env { base: &empty, stack: Vec::new(), config };
    Ok(match env.first_witness(&block, rest)? {
        Some(tables) => Verdict::Sat {
            witness: block.into_iter().cloned().zip(tables).collect(),
        },
        None => Verdict::Unsat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so2::parse_so2;
    use crate::Status;

    const EXAMPLE: &str = "exists f:3 . forall p:0 . forall q:0 . !f(p,p,q) & f(p, q & !q, q)";

    fn decide(text: &str) -> Verdict<So2Witness> {
        decide_so2_bruteforce(&parse_so2(text).unwrap(), &So2Config::default()).unwrap()
    }

    #[test]
    fn negation_flips() {
        let interp: Interpretation = [("p".to_string(), TruthTable::from_msb_str(0, "1").unwrap())].into();
        let cfg = So2Config::default();
        let p = So2Formula::prop("p");
        assert!(eval_so2(&p, &interp, &cfg).unwrap());
        assert!(!eval_so2(&So2Formula::not(p), &interp, &cfg).unwrap());
    }

    #[test]
    fn example_matrix_under_all_zero_table() {
        let (_, matrix) = {
            let phi = parse_so2(EXAMPLE).unwrap();
            let (p, m) = phi.split_prefix();
            (p.len(), m.clone())
        };
        let mut interp = Interpretation::new();
        interp.insert("f".into(), TruthTable::constant(3, false).unwrap());
        interp.insert("p".into(), TruthTable::constant(0, false).unwrap());
        interp.insert("q".into(), TruthTable::constant(0, false).unwrap());
        let cfg = So2Config::default();
        let So2Formula::And(lhs, rhs) = &matrix else { panic!("matrix is a conjunction") };
        assert!(eval_so2(lhs, &interp, &cfg).unwrap());
        assert!(!eval_so2(rhs, &interp, &cfg).unwrap());
        assert!(!eval_so2(&matrix, &interp, &cfg).unwrap());
    }

    #[test]
    fn missing_symbol() {
        let err = eval_so2(&So2Formula::prop("p"), &Interpretation::new(), &So2Config::default());
        assert_eq!(err, Err(So2Error::MissingSymbol("p".into())));
    }

    #[test]
    fn single_proposition_verdicts() {
        let sat = decide("exists p:0 . p()");
        assert_eq!(sat.status(), Status::Sat);
        let witness = sat.witness().unwrap();
        assert_eq!(witness.len(), 1);
        assert_eq!(witness[0].1.to_string(), "1");
        assert_eq!(decide("forall p:0 . p()").status(), Status::Unsat);
    }

    #[test]
    fn example_is_unsat() {
        assert_eq!(decide(EXAMPLE), Verdict::Unsat);
    }

    #[test]
    fn least_witness_is_reported() {
        // f must map 1 to 1 and 0 to 1: only table "11"
        let v = decide("exists f:1 . f(0) & f(1)");
        assert_eq!(v.witness().unwrap()[0].1.to_string(), "11");
        // any f with f(1) = 1; the least index is 0b10
        let v = decide("exists f:1 . f(1)");
        assert_eq!(v.witness().unwrap()[0].1.to_string(), "10");
    }

    #[test]
    fn budget_is_checked_before_search() {
        let v = decide("exists f:4 . exists g:4 . f(1,1,1,1) & g(0,0,0,0)");
        assert!(matches!(v, Verdict::ResourceExceeded { .. }), "{v:?}");
        let v = decide("exists f:5 . 1");
        assert!(matches!(v, Verdict::ResourceExceeded { .. }), "{v:?}");
    }

    #[test]
    fn eval_reports_arity_cap() {
        let phi = parse_so2("exists f:5 . 1").unwrap();
        let err = eval_so2(&phi, &Interpretation::new(), &So2Config::default()).unwrap_err();
        assert!(matches!(err, So2Error::ResourceExceeded(_)));
    }

    #[test]
    fn ordering_respects_relax_flag() {
        let phi = parse_so2("forall p:0 . exists f:1 . f(p) <-> p").unwrap();
        assert!(matches!(
            decide_so2_bruteforce(&phi, &So2Config::default()),
            Err(So2Error::Invalid(_))
        ));
        let relaxed = So2Config { relax_order: true, ..So2Config::default() };
        assert_eq!(decide_so2_bruteforce(&phi, &relaxed).unwrap().status(), Status::Sat);
    }
}
