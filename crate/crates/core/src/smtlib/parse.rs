use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Num;
use thiserror::Error;

use crate::bv::{check_sorts, BinOp, BvFormula, BvTerm, BvVar, Pred, SortError, Width};
use crate::Quantifier;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Smt2Error {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: `{construct}` is outside the supported subset")]
    OutOfSubset { line: usize, column: usize, construct: String },
    #[error("{line}:{column}: unknown symbol `{name}`")]
    Unbound { line: usize, column: usize, name: String },
    #[error("script must contain exactly one assertion, found {0}")]
    AssertionCount(usize),
    #[error(transparent)]
    Sort(#[from] SortError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Atom {
    Symbol(String),
    Numeral(BigUint),
    Binary(String),
    Hex(String),
    Keyword(String),
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(Atom, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn symbol(&self) -> Option<&str> {
        match self {
            Sexp::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }

    fn numeral(&self) -> Option<&BigUint> {
        match self {
            Sexp::Atom(Atom::Numeral(n), _) => Some(n),
            _ => None,
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> Smt2Error {
    Smt2Error::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn unsupported(pos: Pos, construct: impl Into<String>) -> Smt2Error {
    Smt2Error::OutOfSubset { line: pos.line, column: pos.column, construct: construct.into() }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self { chars: text.char_indices().peekable(), line: 1, column: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while !matches!(self.bump(), Some('\n') | None) {}
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn all(mut self) -> Result<Vec<Sexp>, Smt2Error> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                return Ok(out);
            }
            out.push(self.sexp()?);
        }
    }

    fn sexp(&mut self) -> Result<Sexp, Smt2Error> {
        self.skip_trivia();
        let pos = self.pos();
        let token_char = |c: char| !c.is_whitespace() && !matches!(c, '(' | ')' | ';' | '|' | '"');
        match self.peek() {
            None => Err(syntax(pos, "unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, pos));
                        }
                        None => return Err(syntax(pos, "unclosed parenthesis")),
                        _ => items.push(self.sexp()?),
                    }
                }
            }
            Some(')') => Err(syntax(pos, "unexpected `)`")),
            Some('"') => Err(unsupported(pos, "string literal")),
            Some('|') => {
                self.bump();
                let name = self.take_while(|c| c != '|');
                if self.bump() != Some('|') {
                    return Err(syntax(pos, "unterminated quoted symbol"));
                }
                Ok(Sexp::Atom(Atom::Symbol(name), pos))
            }
            Some('#') => {
                self.bump();
                let tok = self.take_while(token_char);
                let atom = match tok.split_at(tok.len().min(1)) {
                    ("b", digits) if !digits.is_empty() && digits.chars().all(|c| c == '0' || c == '1') => {
                        Atom::Binary(digits.to_string())
                    }
                    ("x", digits) if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_hexdigit()) => {
                        Atom::Hex(digits.to_string())
                    }
                    _ => return Err(syntax(pos, format!("malformed literal `#{tok}`"))),
                };
                Ok(Sexp::Atom(atom, pos))
            }
            Some(c) if c.is_ascii_digit() => {
                let tok = self.take_while(token_char);
                if !tok.chars().all(|c| c.is_ascii_digit()) || (tok.len() > 1 && tok.starts_with('0')) {
                    return Err(unsupported(pos, tok));
                }
                Ok(Sexp::Atom(Atom::Numeral(tok.parse().expect("digits")), pos))
            }
            Some(':') => {
                self.bump();
                Ok(Sexp::Atom(Atom::Keyword(self.take_while(token_char)), pos))
            }
            Some(_) => {
                let tok = self.take_while(token_char);
                if !super::emit::is_simple_symbol(&tok) {
                    return Err(syntax(pos, format!("invalid symbol `{tok}`")));
                }
                Ok(Sexp::Atom(Atom::Symbol(tok), pos))
            }
        }
    }
}

struct Builder {
    consts: BTreeMap<String, Width>,
    scope: Vec<BvVar>,
}

fn positive(n: &BigUint, pos: Pos) -> Result<Width, Smt2Error> {
    Width::new(n.clone()).map_err(|_| syntax(pos, "bit-vector width must be positive"))
}

fn parse_sort(s: &Sexp) -> Result<Width, Smt2Error> {
    if let Sexp::List(items, pos) = s {
        if let [u, bv, n] = items.as_slice() {
            if u.symbol() == Some("_") && bv.symbol() == Some("BitVec") {
                let n = n.numeral().ok_or_else(|| syntax(n.pos(), "expected a width"))?;
                return positive(n, *pos);
            }
        }
    }
    Err(unsupported(s.pos(), "sort other than (_ BitVec n)"))
}

fn head(items: &[Sexp]) -> Option<&str> {
    items.first().and_then(Sexp::symbol)
}

fn arity_error(pos: Pos, op: &str, expected: &str, found: usize) -> Smt2Error {
    syntax(pos, format!("`{op}` expects {expected} argument(s), found {found}"))
}

impl Builder {
    fn lookup(&self, name: &str) -> Option<Width> {
        self.scope
            .iter()
            .rev()
            .find(|v| v.name == name)
            .map(|v| v.width.clone())
            .or_else(|| self.consts.get(name).cloned())
    }

    fn term(&self, s: &Sexp) -> Result<BvTerm, Smt2Error> {
        match s {
            Sexp::Atom(Atom::Binary(d), _) => Ok(BvTerm::constant_big(
                BigUint::from_str_radix(d, 2).expect("binary digits"),
                Width::of(d.len() as u64),
            )),
            Sexp::Atom(Atom::Hex(d), _) => Ok(BvTerm::constant_big(
                BigUint::from_str_radix(d, 16).expect("hex digits"),
                Width::of(4 * d.len() as u64),
            )),
            Sexp::Atom(Atom::Symbol(name), pos) => match self.lookup(name) {
                Some(width) => Ok(BvTerm::Var(BvVar::new(name.clone(), width))),
                None => Err(Smt2Error::Unbound { line: pos.line, column: pos.column, name: name.clone() }),
            },
            Sexp::Atom(Atom::Numeral(n), pos) => Err(unsupported(*pos, format!("bare numeral {n}"))),
            Sexp::Atom(Atom::Keyword(k), pos) => Err(unsupported(*pos, format!(":{k}"))),
            Sexp::List(items, pos) => self.application(items, *pos),
        }
    }

    fn application(&self, items: &[Sexp], pos: Pos) -> Result<BvTerm, Smt2Error> {
        let Some(first) = items.first() else {
            return Err(syntax(pos, "empty application"));
        };
        // (_ bvV W)
        if first.symbol() == Some("_") {
            if let [_, Sexp::Atom(Atom::Symbol(name), npos), w] = items {
                if let Some(digits) = name.strip_prefix("bv").filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())) {
                    let width = positive(w.numeral().ok_or_else(|| syntax(w.pos(), "expected a width"))?, w.pos())?;
                    let value: BigUint = digits.parse().expect("digits");
                    if BigUint::from(value.bits()) > *width.value() {
                        return Err(syntax(*npos, format!("{value} does not fit in {width} bits")));
                    }
                    return Ok(BvTerm::constant_big(value, width));
                }
            }
            return Err(unsupported(pos, "indexed identifier"));
        }
        // ((_ extract i j) t)
        if let Sexp::List(inner, ipos) = first {
            if let [u, ex, hi, lo] = inner.as_slice() {
                if u.symbol() == Some("_") && ex.symbol() == Some("extract") {
                    let (Some(hi), Some(lo)) = (hi.numeral(), lo.numeral()) else {
                        return Err(syntax(*ipos, "extract bounds must be numerals"));
                    };
                    let [_, arg] = items else {
                        return Err(arity_error(pos, "extract", "1", items.len() - 1));
                    };
                    return Ok(BvTerm::Extract { term: Box::new(self.term(arg)?), hi: hi.clone(), lo: lo.clone() });
                }
            }
            return Err(unsupported(*ipos, "indexed operator"));
        }
        let op = first.symbol().ok_or_else(|| syntax(first.pos(), "expected an operator"))?;
        let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        let left_assoc = |f: fn(BvTerm, BvTerm) -> BvTerm| -> Result<BvTerm, Smt2Error> {
            if args.len() < 2 {
                return Err(arity_error(pos, op, "at least 2", args.len()));
            }
            let mut it = args.clone().into_iter();
            let init = it.next().expect("nonempty");
            Ok(it.fold(init, f))
        };
        let binop = match op {
            "bvnot" => {
                return match <[BvTerm; 1]>::try_from(args) {
                    Ok([a]) => Ok(BvTerm::not(a)),
                    Err(args) => Err(arity_error(pos, op, "1", args.len())),
                }
            }
            "concat" => return left_assoc(BvTerm::concat),
            "bvadd" => BinOp::Add,
            "bvmul" => BinOp::Mul,
            "bvand" => BinOp::And,
            "bvor" => BinOp::Or,
            "bvxor" => BinOp::Xor,
            "bvudiv" => BinOp::Udiv,
            "bvshl" => BinOp::Shl,
            "bvlshr" => BinOp::Lshr,
            other => return Err(unsupported(first.pos(), other)),
        };
        if matches!(binop, BinOp::Udiv | BinOp::Shl | BinOp::Lshr) {
            return match <[BvTerm; 2]>::try_from(args) {
                Ok([a, b]) => Ok(BvTerm::binary(binop, a, b)),
                Err(args) => Err(arity_error(pos, op, "2", args.len())),
            };
        }
        let mut it = args.into_iter();
        match (it.next(), it.next()) {
            (Some(a), Some(b)) => Ok(it.fold(BvTerm::binary(binop, a, b), |acc, t| BvTerm::binary(binop, acc, t))),
            _ => Err(arity_error(pos, op, "at least 2", items.len() - 1)),
        }
    }

    fn formula(&mut self, s: &Sexp) -> Result<BvFormula, Smt2Error> {
        let Sexp::List(items, pos) = s else {
            let what = s.symbol().unwrap_or("atom");
            return Err(unsupported(s.pos(), format!("formula `{what}`")));
        };
        let pos = *pos;
        let op = head(items).ok_or_else(|| syntax(pos, "expected a connective or predicate"))?;
        match op {
            "exists" | "forall" => {
                let q = if op == "exists" { Quantifier::Exists } else { Quantifier::Forall };
                let [_, Sexp::List(bindings, bpos), body] = items.as_slice() else {
                    return Err(syntax(pos, format!("malformed `{op}`")));
                };
                if bindings.is_empty() {
                    return Err(syntax(*bpos, "empty binder list"));
                }
                let mut vars = Vec::new();
                for b in bindings {
                    match b {
                        Sexp::List(pair, _) if pair.len() == 2 && pair[0].symbol().is_some() => {
                            let v = BvVar::new(pair[0].symbol().expect("checked"), parse_sort(&pair[1])?);
                            vars.push(v);
                        }
                        _ => return Err(syntax(b.pos(), "expected (name sort)")),
                    }
                }
                let mark = self.scope.len();
                self.scope.extend(vars.iter().cloned());
                let body = self.formula(body);
                self.scope.truncate(mark);
                let body = body?;
                Ok(vars.into_iter().rev().fold(body, |acc, v| BvFormula::Quant(q, v, Box::new(acc))))
            }
            "and" | "or" => {
                let parts = items[1..].iter().map(|f| self.formula(f)).collect::<Result<Vec<_>, _>>()?;
                if parts.len() < 2 {
                    return Err(arity_error(pos, op, "at least 2", parts.len()));
                }
                let f = if op == "and" { BvFormula::and } else { BvFormula::or };
                let mut it = parts.into_iter();
                let init = it.next().expect("nonempty");
                Ok(it.fold(init, f))
            }
            "not" => match items.as_slice() {
                [_, a] => Ok(BvFormula::not(self.formula(a)?)),
                _ => Err(arity_error(pos, op, "1", items.len() - 1)),
            },
            "=" | "bvule" | "bvsle" => {
                let p = match op {
                    "=" => Pred::Eq,
                    "bvule" => Pred::Ule,
                    _ => Pred::Sle,
                };
                match items.as_slice() {
                    [_, a, b] => Ok(BvFormula::Atom(p, self.term(a)?, self.term(b)?)),
                    _ => Err(arity_error(pos, op, "2", items.len() - 1)),
                }
            }
            other => Err(unsupported(items[0].pos(), other)),
        }
    }
}

/// Parses the script subset produced by [`super::emit_smt2`]: `set-logic`,
/// `declare-const` (or nullary `declare-fun`) at bit-vector sorts, exactly one
/// `assert`, then optional `check-sat` and `exit`. The result passes
/// [`check_sorts`].
pub fn parse_smt2_subset(text: &str) -> Result<BvFormula, Smt2Error> {
    let commands = Reader::new(text).all()?;
    let mut b = Builder { consts: BTreeMap::new(), scope: Vec::new() };
    let mut assertions = Vec::new();
    for cmd in &commands {
        let Sexp::List(items, pos) = cmd else {
            return Err(syntax(cmd.pos(), "expected a command"));
        };
        let name = head(items).ok_or_else(|| syntax(*pos, "expected a command name"))?;
        match (name, &items[1..]) {
            ("set-logic", [logic]) if logic.symbol().is_some() => {}
            ("declare-const", [v, s]) | ("declare-fun", [v, Sexp::List(_, _), s])
                if v.symbol().is_some() && (name == "declare-const" || matches!(&items[2], Sexp::List(a, _) if a.is_empty())) =>
            {
                let v_name = v.symbol().expect("checked").to_string();
                if b.consts.contains_key(&v_name) {
                    return Err(syntax(v.pos(), format!("`{v_name}` declared twice")));
                }
                b.consts.insert(v_name, parse_sort(s)?);
            }
            ("assert", [f]) => assertions.push(b.formula(f)?),
            ("check-sat" | "exit", []) => {}
            ("set-logic" | "declare-const" | "declare-fun" | "assert" | "check-sat" | "exit", _) => {
                return Err(syntax(*pos, format!("malformed `{name}`")));
            }
            (other, _) => return Err(unsupported(items[0].pos(), other)),
        }
    }
    if assertions.len() != 1 {
        return Err(Smt2Error::AssertionCount(assertions.len()));
    }
    let phi = assertions.pop().expect("one assertion");
    check_sorts(&phi)?;
    Ok(phi)
}
