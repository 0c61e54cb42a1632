//! Second-order Boolean logic: quantified Boolean formulas extended with
//! quantification over Boolean function symbols.

mod eval;
mod interp;
mod parse;
mod validate;

use std::fmt;

use crate::Quantifier;

pub use eval::{decide_so2_bruteforce, eval_so2, So2Config, So2Error, So2Witness};
pub use interp::{parse_interpretation, Interpretation, InterpretationError, TruthTable};
pub use parse::{parse_so2, parse_so2_with, FreeSymbols, ParseError, ParseErrorKind, ParseOptions};
pub use validate::{validate_prenex_closed, Diagnostics, ValidateOptions, Violation};

/// A function symbol with its arity. Arity zero makes it a proposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionSymbol {
    pub name: String,
    pub arity: u32,
}

impl FunctionSymbol {
    pub fn new(name: impl Into<String>, arity: u32) -> Self {
        Self { name: name.into(), arity }
    }

    pub fn is_proposition(&self) -> bool {
        self.arity == 0
    }

    /// Number of bits in this symbol's truth table, `2^arity`.
    /// `None` if that does not fit in a `u64`.
    pub fn table_bits(&self) -> Option<u64> {
        1u64.checked_shl(self.arity)
    }
}

impl fmt::Display for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.arity)
    }
}

/// Abstract syntax of SO2 formulas.
///
/// `Lit` is an extension of the core grammar; disjunction, implication and
/// equivalence only exist in the surface syntax and are desugared by the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum So2Formula {
    Lit(bool),
    And(Box<So2Formula>, Box<So2Formula>),
    Not(Box<So2Formula>),
    Apply(FunctionSymbol, Vec<So2Formula>),
    Quant(Quantifier, FunctionSymbol, Box<So2Formula>),
}

impl So2Formula {
    pub fn and(lhs: So2Formula, rhs: So2Formula) -> Self {
        So2Formula::And(Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: So2Formula) -> Self {
        So2Formula::Not(Box::new(inner))
    }

    pub fn or(lhs: So2Formula, rhs: So2Formula) -> Self {
        Self::not(Self::and(Self::not(lhs), Self::not(rhs)))
    }

    pub fn implies(lhs: So2Formula, rhs: So2Formula) -> Self {
        Self::not(Self::and(lhs, Self::not(rhs)))
    }

    pub fn iff(lhs: So2Formula, rhs: So2Formula) -> Self {
        Self::and(
            Self::implies(lhs.clone(), rhs.clone()),
            Self::implies(rhs, lhs),
        )
    }

    pub fn apply(symbol: FunctionSymbol, args: Vec<So2Formula>) -> Self {
        So2Formula::Apply(symbol, args)
    }

    /// `name()` for a proposition.
    pub fn prop(name: impl Into<String>) -> Self {
        So2Formula::Apply(FunctionSymbol::new(name, 0), Vec::new())
    }

    pub fn exists(symbol: FunctionSymbol, body: So2Formula) -> Self {
        So2Formula::Quant(Quantifier::Exists, symbol, Box::new(body))
    }

    pub fn forall(symbol: FunctionSymbol, body: So2Formula) -> Self {
        So2Formula::Quant(Quantifier::Forall, symbol, Box::new(body))
    }

    /// Wraps `matrix` in the given quantifier prefix, outermost first.
    pub fn with_prefix(prefix: Vec<(Quantifier, FunctionSymbol)>, matrix: So2Formula) -> Self {
        prefix
            .into_iter()
            .rev()
            .fold(matrix, |body, (q, sym)| So2Formula::Quant(q, sym, Box::new(body)))
    }

    /// Splits off the leading quantifiers. The returned matrix may still
    /// contain quantifiers if the formula is not prenex.
    pub fn split_prefix(&self) -> (Vec<(Quantifier, &FunctionSymbol)>, &So2Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        while let So2Formula::Quant(q, sym, body) = cur {
            prefix.push((*q, sym));
            cur = body;
        }
        (prefix, cur)
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            So2Formula::Lit(_) => true,
            So2Formula::And(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            So2Formula::Not(a) => a.is_quantifier_free(),
            So2Formula::Apply(_, args) => args.iter().all(So2Formula::is_quantifier_free),
            So2Formula::Quant(..) => false,
        }
    }

    /// Prefix with every quantifier swapped over the negated matrix. A closed
    /// prenex formula is satisfiable iff its dual is not.
    pub fn dualize(&self) -> So2Formula {
        let (prefix, matrix) = self.split_prefix();
        let prefix = prefix
            .into_iter()
            .map(|(q, sym)| (q.dual(), sym.clone()))
            .collect();
        So2Formula::with_prefix(prefix, So2Formula::not(matrix.clone()))
    }

    /// Size of the formula: one per connective, application and literal, plus
    /// `1 + L(arity)` per quantifier, mirroring the bit-vector size metric.
    pub fn size(&self) -> u64 {
        match self {
            So2Formula::Lit(_) => 1,
            So2Formula::And(a, b) => 1 + a.size() + b.size(),
            So2Formula::Not(a) => 1 + a.size(),
            So2Formula::Apply(_, args) => 1 + args.iter().map(So2Formula::size).sum::<u64>(),
            So2Formula::Quant(_, sym, body) => {
                1 + crate::bv::scalar_length_u64(u64::from(sym.arity)) + body.size()
            }
        }
    }
}

impl fmt::Display for So2Formula {
    /// Prints in the surface syntax accepted by [`parse_so2`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prefix, matrix) = self.split_prefix();
        for (q, sym) in prefix {
            write!(f, "{q} {sym} . ")?;
        }
        fmt_matrix(matrix, f, false)
    }
}

fn fmt_matrix(phi: &So2Formula, f: &mut fmt::Formatter<'_>, in_conj_rhs: bool) -> fmt::Result {
    match phi {
        So2Formula::Lit(b) => f.write_str(if *b { "1" } else { "0" }),
        So2Formula::And(a, b) => {
            if in_conj_rhs {
                f.write_str("(")?;
            }
            fmt_unary(a, f)?;
            f.write_str(" & ")?;
            fmt_matrix(b, f, true)?;
            if in_conj_rhs {
                f.write_str(")")?;
            }
            Ok(())
        }
        So2Formula::Not(_) | So2Formula::Apply(..) => fmt_unary(phi, f),
        So2Formula::Quant(..) => write!(f, "({phi})"),
    }
}

// Operand of `&` on the left, or of `!`.
fn fmt_unary(phi: &So2Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match phi {
        So2Formula::Not(a) => {
            f.write_str("!")?;
            fmt_unary(a, f)
        }
        So2Formula::Apply(sym, args) => {
            f.write_str(&sym.name)?;
            if sym.arity == 0 && args.is_empty() {
                return Ok(());
            }
            f.write_str("(")?;
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                fmt_matrix(arg, f, false)?;
            }
            f.write_str(")")
        }
        So2Formula::Lit(_) => fmt_matrix(phi, f, false),
        So2Formula::And(..) | So2Formula::Quant(..) => {
            f.write_str("(")?;
            fmt_matrix(phi, f, false)?;
            f.write_str(")")
        }
    }
}
