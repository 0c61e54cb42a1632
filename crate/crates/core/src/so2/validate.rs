use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{FunctionSymbol, So2Formula};

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Report "proper functions before propositions" violations as warnings
    /// instead of errors.
    pub relax_order: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    FreeSymbol { name: String },
    QuantifierInMatrix { symbol: String },
    /// A proper function is quantified after a proposition.
    OrderViolation { proposition: String, function: String },
    DuplicateBinder { name: String },
    ArityMismatch { name: String, expected: u32, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FreeSymbol { name } => write!(f, "symbol `{name}` is not quantified"),
            Violation::QuantifierInMatrix { symbol } => {
                write!(f, "quantifier over `{symbol}` occurs inside the matrix")
            }
            Violation::OrderViolation { proposition, function } => write!(
                f,
                "proposition `{proposition}` is quantified before proper function `{function}`"
            ),
            Violation::DuplicateBinder { name } => {
                write!(f, "symbol `{name}` is quantified more than once")
            }
            Violation::ArityMismatch { name, expected, found } => write!(
                f,
                "symbol `{name}` has arity {expected} but is applied to {found} argument(s)"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub errors: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks that `phi` is closed, prenex (quantifier prefix over a
/// quantifier-free matrix) and quantifies every proper function before any
/// proposition.
pub fn validate_prenex_closed(phi: &So2Formula, options: ValidateOptions) -> Diagnostics {
    let mut diag = Diagnostics::default();
    let (prefix, matrix) = phi.split_prefix();

    let mut bound: BTreeMap<&str, u32> = BTreeMap::new();
    let mut first_prop: Option<&FunctionSymbol> = None;
    for (_, sym) in &prefix {
        if bound.insert(sym.name.as_str(), sym.arity).is_some() {
            diag.errors.push(Violation::DuplicateBinder { name: sym.name.clone() });
        }
        match first_prop {
            None if sym.is_proposition() => first_prop = Some(sym),
            Some(prop) if !sym.is_proposition() => {
                let v = Violation::OrderViolation {
                    proposition: prop.name.clone(),
                    function: sym.name.clone(),
                };
                if options.relax_order {
                    diag.warnings.push(v);
                } else {
                    diag.errors.push(v);
                }
            }
            _ => {}
        }
    }

    let mut free = BTreeSet::new();
    check_matrix(matrix, &bound, &mut free, &mut diag);
    diag
}

fn check_matrix<'a>(
    phi: &'a So2Formula,
    bound: &BTreeMap<&'a str, u32>,
    free: &mut BTreeSet<&'a str>,
    diag: &mut Diagnostics,
) {
    match phi {
        So2Formula::Lit(_) => {}
        So2Formula::And(a, b) => {
            check_matrix(a, bound, free, diag);
            check_matrix(b, bound, free, diag);
        }
        So2Formula::Not(a) => check_matrix(a, bound, free, diag),
        So2Formula::Apply(sym, args) => {
            let expected = match bound.get(sym.name.as_str()) {
                Some(&arity) => arity,
                None => {
                    if free.insert(sym.name.as_str()) {
                        diag.errors.push(Violation::FreeSymbol { name: sym.name.clone() });
                    }
                    sym.arity
                }
            };
            if expected as usize != args.len() || sym.arity != expected {
                diag.errors.push(Violation::ArityMismatch {
                    name: sym.name.clone(),
                    expected,
                    found: args.len(),
                });
            }
            for arg in args {
                check_matrix(arg, bound, free, diag);
            }
        }
        So2Formula::Quant(_, sym, body) => {
            diag.errors.push(Violation::QuantifierInMatrix { symbol: sym.name.clone() });
            let mut inner = bound.clone();
            inner.insert(sym.name.as_str(), sym.arity);
            check_matrix(body, &inner, free, diag);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so2::{parse_so2, parse_so2_with, FreeSymbols, ParseOptions};

    const EXAMPLE: &str = "exists f:3 . forall p:0 . forall q:0 . !f(p,p,q) & f(p, q & !q, q)";

    #[test]
    fn example_is_valid() {
        let phi = parse_so2(EXAMPLE).unwrap();
        let d = validate_prenex_closed(&phi, ValidateOptions::default());
        assert!(d.is_ok(), "{d:?}");
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn proposition_before_function_is_an_ordering_violation() {
        let phi = parse_so2("forall p:0 . exists f:2 . f(p,p)").unwrap();
        let expected = Violation::OrderViolation { proposition: "p".into(), function: "f".into() };
        let d = validate_prenex_closed(&phi, ValidateOptions::default());
        assert_eq!(d.errors, vec![expected.clone()]);

        let d = validate_prenex_closed(&phi, ValidateOptions { relax_order: true });
        assert!(d.is_ok());
        assert_eq!(d.warnings, vec![expected]);
    }

    #[test]
    fn free_symbol_means_not_closed() {
        let opts = ParseOptions { free: FreeSymbols::Infer };
        let phi = parse_so2_with("exists f:1 . f(g())", &opts).unwrap();
        let d = validate_prenex_closed(&phi, ValidateOptions::default());
        assert_eq!(d.errors, vec![Violation::FreeSymbol { name: "g".into() }]);
    }

    #[test]
    fn quantifier_inside_matrix() {
        let p = FunctionSymbol::new("p", 0);
        let phi = So2Formula::and(
            So2Formula::Lit(true),
            So2Formula::exists(p, So2Formula::prop("p")),
        );
        let d = validate_prenex_closed(&phi, ValidateOptions::default());
        assert_eq!(d.errors, vec![Violation::QuantifierInMatrix { symbol: "p".into() }]);
    }

    #[test]
    fn duplicate_binders_and_bad_arity_in_handbuilt_ast() {
        let f = FunctionSymbol::new("f", 1);
        let phi = So2Formula::exists(
            f.clone(),
            So2Formula::forall(f.clone(), So2Formula::apply(f, vec![])),
        );
        let d = validate_prenex_closed(&phi, ValidateOptions::default());
        assert!(d.errors.contains(&Violation::DuplicateBinder { name: "f".into() }));
        assert!(d
            .errors
            .contains(&Violation::ArityMismatch { name: "f".into(), expected: 1, found: 0 }));
    }
}
