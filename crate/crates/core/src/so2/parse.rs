//! Surface syntax for SO2 formulas.
//!
//! ```text
//! formula := quant* matrix
//! quant   := ("exists" | "forall") IDENT ":" NAT "."
//! matrix  := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" or)*          (right associative)
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | atom
//! atom    := "0" | "1" | IDENT "(" [matrix ("," matrix)*] ")" | IDENT | "(" matrix ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{FunctionSymbol, So2Formula};
use crate::Quantifier;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("symbol `{name}` has arity {expected} but is applied to {found} argument(s)")]
    ArityMismatch {
        name: String,
        expected: u32,
        found: usize,
    },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("symbol `{0}` is quantified more than once")]
    DuplicateBinder(String),
}

/// How symbols that are not bound by the quantifier prefix are treated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum FreeSymbols {
    /// Free symbols are an error.
    #[default]
    Reject,
    /// The arity of a free symbol is taken from its first use.
    Infer,
    /// Free symbols must appear in the map, with the given arity.
    Declared(BTreeMap<String, u32>),
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub free: FreeSymbols,
}

/// Parses a closed prenex formula; free symbols are rejected.
pub fn parse_so2(text: &str) -> Result<So2Formula, ParseError> {
    parse_so2_with(text, &ParseOptions::default())
}

pub fn parse_so2_with(text: &str, options: &ParseOptions) -> Result<So2Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        bound: BTreeMap::new(),
        inferred: BTreeMap::new(),
        unbound: None,
        free: &options.free,
    };
    let formula = parser.formula()?;
    parser.expect_eof()?;
    // Unbound symbols are reported only after the whole input parsed, so that
    // an arity error on an enclosing application takes precedence.
    if let Some(err) = parser.unbound {
        return Err(err);
    }
    Ok(formula)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(String),
    Exists,
    Forall,
    Colon,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Nat(s) => write!(f, "number `{s}`"),
            Tok::Exists => f.write_str("`exists`"),
            Tok::Forall => f.write_str("`forall`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l, column: col });
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            ':' | '.' | '!' | '&' | '|' | '(' | ')' | ',' => {
                bump!();
                let tok = match c {
                    ':' => Tok::Colon,
                    '.' => Tok::Dot,
                    '!' => Tok::Bang,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                push(&mut out, tok);
            }
            '-' => {
                bump!();
                if bump!() != Some('>') {
                    return Err(syntax(l, col, "expected `->`"));
                }
                push(&mut out, Tok::Arrow);
            }
            '<' => {
                bump!();
                if bump!() != Some('-') || bump!() != Some('>') {
                    return Err(syntax(l, col, "expected `<->`"));
                }
                push(&mut out, Tok::Iff);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                push(&mut out, Tok::Nat(s));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                let tok = match s.as_str() {
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    _ => Tok::Ident(s),
                };
                push(&mut out, tok);
            }
            other => return Err(syntax(l, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, column, kind: ParseErrorKind::Syntax(msg.into()) }
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    bound: BTreeMap<String, u32>,
    inferred: BTreeMap<String, u32>,
    unbound: Option<ParseError>,
    free: &'a FreeSymbols,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError { line: t.line, column: t.column, kind }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().to_string();
        self.error_here(ParseErrorKind::Syntax(format!("expected {wanted}, found {found}")))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::Exists | Tok::Forall => Err(self.error_here(ParseErrorKind::Syntax(
                "quantifiers must precede the matrix".into(),
            ))),
            _ => Err(self.unexpected("end of input")),
        }
    }

    fn formula(&mut self) -> Result<So2Formula, ParseError> {
        let mut prefix = Vec::new();
        loop {
            let q = match self.peek() {
                Tok::Exists => Quantifier::Exists,
                Tok::Forall => Quantifier::Forall,
                _ => break,
            };
            self.next();
            let start = self.pos;
            let name = match self.next().tok {
                Tok::Ident(name) => name,
                _ => {
                    self.pos = start;
                    return Err(self.unexpected("a symbol name"));
                }
            };
            self.expect(Tok::Colon, "`:`")?;
            let arity = match self.peek().clone() {
                Tok::Nat(n) => n
                    .parse::<u32>()
                    .map_err(|_| self.error_here(ParseErrorKind::Syntax(format!("arity `{n}` is too large"))))?,
                _ => return Err(self.unexpected("an arity")),
            };
            self.next();
            self.expect(Tok::Dot, "`.`")?;
            if self.bound.insert(name.clone(), arity).is_some() {
                self.pos = start;
                return Err(self.error_here(ParseErrorKind::DuplicateBinder(name)));
            }
            prefix.push((q, FunctionSymbol::new(name, arity)));
        }
        let matrix = self.iff()?;
        Ok(So2Formula::with_prefix(prefix, matrix))
    }

    fn iff(&mut self) -> Result<So2Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.next();
            let rhs = self.imp()?;
            lhs = So2Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<So2Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.imp()?;
            return Ok(So2Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<So2Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.next();
            let rhs = self.and()?;
            lhs = So2Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<So2Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.next();
            let rhs = self.unary()?;
            lhs = So2Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<So2Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.next();
            return Ok(So2Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<So2Formula, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) if n == "0" || n == "1" => {
                self.next();
                Ok(So2Formula::Lit(n == "1"))
            }
            Tok::Nat(n) => Err(self.error_here(ParseErrorKind::Syntax(format!(
                "`{n}` is not a boolean literal"
            )))),
            Tok::LParen => {
                self.next();
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.pos;
                self.next();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.next();
                    if *self.peek() != Tok::RParen {
                        args.push(self.iff()?);
                        while *self.peek() == Tok::Comma {
                            self.next();
                            args.push(self.iff()?);
                        }
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                }
                let arity = self.resolve(&name, args.len(), at)?;
                Ok(So2Formula::Apply(FunctionSymbol::new(name, arity), args))
            }
            Tok::Exists | Tok::Forall => Err(self.error_here(ParseErrorKind::Syntax(
                "quantifiers must precede the matrix".into(),
            ))),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn resolve(&mut self, name: &str, found: usize, at: usize) -> Result<u32, ParseError> {
        let declared = match self.free {
            FreeSymbols::Declared(map) => map.get(name).copied(),
            _ => None,
        };
        let arity = match (self.bound.get(name), declared) {
            (Some(&a), _) | (None, Some(a)) => a,
            (None, None) => {
                if !matches!(self.free, FreeSymbols::Infer) && self.unbound.is_none() {
                    let t = &self.tokens[at];
                    self.unbound = Some(ParseError {
                        line: t.line,
                        column: t.column,
                        kind: ParseErrorKind::Unbound(name.to_string()),
                    });
                }
                *self.inferred.entry(name.to_string()).or_insert(found as u32)
            }
        };
        if arity as usize != found {
            let t = &self.tokens[at];
            return Err(ParseError {
                line: t.line,
                column: t.column,
                kind: ParseErrorKind::ArityMismatch {
                    name: name.to_string(),
                    expected: arity,
                    found,
                },
            });
        }
        Ok(arity)
    }
}
