//! Reference implementations shared by the integration tests.
//!
//! Bit-vectors here are plain `Vec<bool>` lists, least significant bit first,
//! and every operation is spelled out bit by bit, so none of the library's
//! word arithmetic is reused.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use so2bv::bv::{BinOp, BvFormula, BvTerm, BvVar, Pred, Width};
use so2bv::Quantifier;

pub type Bits = Vec<bool>;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn bits_of(value: u64, width: usize) -> Bits {
    (0..width).map(|i| i < 64 && (value >> i) & 1 == 1).collect()
}

pub fn number(bits: &[bool]) -> u64 {
    bits.iter().rev().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

fn add(a: &[bool], b: &[bool]) -> Bits {
    let mut carry = false;
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let s = x ^ y ^ carry;
            carry = (x && y) || (carry && (x ^ y));
            s
        })
        .collect()
}

fn shift_up(a: &[bool], by: usize) -> Bits {
    (0..a.len()).map(|i| i >= by && a[i - by]).collect()
}

fn shift_down(a: &[bool], by: usize) -> Bits {
    (0..a.len()).map(|i| i + by < a.len() && a[i + by]).collect()
}

fn mul(a: &[bool], b: &[bool]) -> Bits {
    let mut acc = vec![false; a.len()];
    for (i, &bit) in b.iter().enumerate() {
        if bit {
            acc = add(&acc, &shift_up(a, i));
        }
    }
    acc
}

/// `a >= b` on equal-width unsigned lists, scanning from the top bit.
fn uge(a: &[bool], b: &[bool]) -> bool {
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return a[i];
        }
    }
    true
}

fn sub(a: &[bool], b: &[bool]) -> Bits {
    let not_b: Bits = b.iter().map(|x| !x).collect();
    let mut one = vec![false; a.len()];
    one[0] = true;
    add(a, &add(&not_b, &one))
}

/// Restoring long division; a zero divisor yields all ones.
fn udiv(a: &[bool], b: &[bool]) -> Bits {
    let n = a.len();
    if b.iter().all(|x| !x) {
        return vec![true; n];
    }
    // one spare bit so the doubled remainder never overflows
    let mut d = b.to_vec();
    d.push(false);
    let mut q = vec![false; n];
    let mut r = vec![false; n + 1];
    for i in (0..n).rev() {
        r = shift_up(&r, 1);
        r[0] = a[i];
        if uge(&r, &d) {
            r = sub(&r, &d);
            q[i] = true;
        }
    }
    q
}

/// Amount of a shift, saturated to the width.
fn shift_amount(s: &[bool]) -> usize {
    let n = s.len();
    for (i, &bit) in s.iter().enumerate() {
        if bit && (i >= 32 || (1usize << i) >= n) {
            return n;
        }
    }
    number(s) as usize
}

/// Signed `a <= b`: a set sign bit marks the smaller operand unless both match.
fn sle(a: &[bool], b: &[bool]) -> bool {
    let (sa, sb) = (a[a.len() - 1], b[b.len() - 1]);
    if sa != sb {
        return sa;
    }
    uge(b, a)
}

pub type RefEnv = HashMap<String, Bits>;

pub fn ref_term(t: &BvTerm, env: &RefEnv) -> Bits {
    match t {
        BvTerm::Const { value, width } => {
            let w = width.to_usize().unwrap();
            (0..w).map(|i| value.bit(i as u64)).collect()
        }
        BvTerm::Var(v) => env.get(&v.name).unwrap_or_else(|| panic!("unbound {}", v.name)).clone(),
        BvTerm::Not(a) => ref_term(a, env).into_iter().map(|b| !b).collect(),
        BvTerm::Binary(op, a, b) => {
            let (a, b) = (ref_term(a, env), ref_term(b, env));
            assert_eq!(a.len(), b.len());
            match op {
                BinOp::Add => add(&a, &b),
                BinOp::Mul => mul(&a, &b),
                BinOp::Udiv => udiv(&a, &b),
                BinOp::And => a.iter().zip(&b).map(|(x, y)| *x && *y).collect(),
                BinOp::Or => a.iter().zip(&b).map(|(x, y)| *x || *y).collect(),
                BinOp::Xor => a.iter().zip(&b).map(|(x, y)| x ^ y).collect(),
                BinOp::Shl => shift_up(&a, shift_amount(&b)),
                BinOp::Lshr => shift_down(&a, shift_amount(&b)),
            }
        }
        BvTerm::Concat(hi, lo) => {
            let mut out = ref_term(lo, env);
            out.extend(ref_term(hi, env));
            out
        }
        BvTerm::Extract { term, hi, lo } => {
            let bits = ref_term(term, env);
            let (hi, lo) = (hi.to_usize().unwrap(), lo.to_usize().unwrap());
            bits[lo..=hi].to_vec()
        }
        BvTerm::Index { term, index } => {
            let (t, s) = (ref_term(term, env), ref_term(index, env));
            let at = shift_amount(&s);
            vec![at < t.len() && t[at]]
        }
    }
}

/// Truth value by exhaustive maximum (exists) or minimum (forall) over every
/// value of each bound variable. No short-circuiting.
pub fn ref_formula(phi: &BvFormula, env: &mut RefEnv) -> bool {
    match phi {
        BvFormula::Atom(p, a, b) => {
            let (a, b) = (ref_term(a, env), ref_term(b, env));
            match p {
                Pred::Eq => a == b,
                Pred::Ule => uge(&b, &a),
                Pred::Sle => sle(&a, &b),
            }
        }
        BvFormula::And(a, b) => ref_formula(a, env) & ref_formula(b, env),
        BvFormula::Or(a, b) => ref_formula(a, env) | ref_formula(b, env),
        BvFormula::Not(a) => !ref_formula(a, env),
        BvFormula::Quant(q, v, body) => {
            let w = v.width.to_usize().unwrap();
            let saved = env.get(&v.name).cloned();
            let results: Vec<bool> = (0..1u64 << w)
                .map(|k| {
                    env.insert(v.name.clone(), bits_of(k, w));
                    ref_formula(body, env)
                })
                .collect();
            match saved {
                Some(old) => env.insert(v.name.clone(), old),
                None => env.remove(&v.name),
            };
            match q {
                Quantifier::Exists => results.into_iter().max().unwrap(),
                Quantifier::Forall => results.into_iter().min().unwrap(),
            }
        }
    }
}

pub fn ref_closed(phi: &BvFormula) -> bool {
    ref_formula(phi, &mut RefEnv::new())
}

/// Random well-sorted formulas over small widths, closed unless `free` lists
/// variables to draw on.
pub struct BvGen {
    pub rng: ChaCha8Rng,
    pub max_width: u64,
    pub allow_index: bool,
    scope: Vec<BvVar>,
    fresh: usize,
}

impl BvGen {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), max_width: 4, allow_index: true, scope: Vec::new(), fresh: 0 }
    }

    pub fn with_free(mut self, free: &[BvVar]) -> Self {
        self.scope.extend(free.iter().cloned());
        self
    }

    fn width(&mut self) -> u64 {
        self.rng.gen_range(1..=self.max_width)
    }

    pub fn term(&mut self, w: u64, depth: u32) -> BvTerm {
        let mut seen = std::collections::HashSet::new();
        let vars: Vec<BvVar> = self
            .scope
            .iter()
            .rev()
            .filter(|v| seen.insert(v.name.clone()) && v.width == Width::of(w))
            .cloned()
            .collect();
        if depth == 0 || self.rng.gen_bool(0.25) {
            if !vars.is_empty() && self.rng.gen_bool(0.7) {
                return BvTerm::Var(vars[self.rng.gen_range(0..vars.len())].clone());
            }
            return BvTerm::constant(self.rng.gen_range(0..1u64 << w), w);
        }
        match self.rng.gen_range(0..5) {
            0 => BvTerm::not(self.term(w, depth - 1)),
            1 => {
                let op = BinOp::ALL[self.rng.gen_range(0..BinOp::ALL.len())];
                BvTerm::binary(op, self.term(w, depth - 1), self.term(w, depth - 1))
            }
            2 if w >= 2 => {
                let hi = self.rng.gen_range(1..w);
                BvTerm::concat(self.term(hi, depth - 1), self.term(w - hi, depth - 1))
            }
            3 if w < 2 * self.max_width => {
                let src = self.rng.gen_range(w..=self.max_width.max(w));
                let lo = self.rng.gen_range(0..=src - w);
                BvTerm::extract(self.term(src, depth - 1), lo + w - 1, lo)
            }
            4 if w == 1 && self.allow_index => {
                let n = self.width();
                BvTerm::index(self.term(n, depth - 1), self.term(n, depth - 1))
            }
            _ => BvTerm::binary(BinOp::Xor, self.term(w, depth - 1), self.term(w, depth - 1)),
        }
    }

    fn atom(&mut self, depth: u32) -> BvFormula {
        let w = self.width();
        let (a, b) = (self.term(w, depth), self.term(w, depth));
        match self.rng.gen_range(0..3) {
            0 => BvFormula::eq(a, b),
            1 => BvFormula::ule(a, b),
            _ => BvFormula::sle(a, b),
        }
    }

    /// Quantifiers may appear under connectives; the total width of all
    /// binders stays within `bits`.
    pub fn formula(&mut self, depth: u32, bits: &mut u64) -> BvFormula {
        if depth == 0 {
            return self.atom(2);
        }
        match self.rng.gen_range(0..6) {
            0 => BvFormula::and(self.formula(depth - 1, bits), self.formula(depth - 1, bits)),
            1 => BvFormula::or(self.formula(depth - 1, bits), self.formula(depth - 1, bits)),
            2 => BvFormula::not(self.formula(depth - 1, bits)),
            3 | 4 if *bits > 0 => {
                let w = self.rng.gen_range(1..=self.max_width.min(*bits));
                *bits -= w;
                self.fresh += 1;
                // reuse names now and then so shadowing gets exercised
                let name = if self.fresh.is_multiple_of(3) { "x".to_string() } else { format!("v{}", self.fresh) };
                let v = BvVar::new(name, Width::of(w));
                self.scope.push(v.clone());
                let body = self.formula(depth - 1, bits);
                self.scope.pop();
                if self.rng.gen_bool(0.5) {
                    BvFormula::exists(v, body)
                } else {
                    BvFormula::forall(v, body)
                }
            }
            _ => self.atom(2),
        }
    }

    /// A closed formula with a quantifier prefix of up to `bits` total width
    /// over a matrix that may contain further quantifiers.
    pub fn closed(&mut self, bits: u64) -> BvFormula {
        let mut budget = bits;
        let mut prefix = Vec::new();
        while budget > 0 && prefix.len() < 3 {
            let w = self.rng.gen_range(1..=self.max_width.min(budget));
            budget -= w;
            let v = BvVar::new(format!("p{}", prefix.len()), Width::of(w));
            self.scope.push(v.clone());
            let q = if self.rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall };
            prefix.push((q, v));
        }
        let matrix = self.formula(3, &mut budget);
        self.scope.truncate(self.scope.len() - prefix.len());
        BvFormula::with_prefix(prefix, matrix)
    }
}

pub fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

pub fn to_u64(v: &BigUint) -> u64 {
    v.to_u64().unwrap()
}

/// External solver for differential tests: `SO2BV_SOLVER` if set, else `z3`
/// found on `PATH`.
pub fn find_solver() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("SO2BV_SOLVER") {
        return Some(PathBuf::from(p));
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join("z3")).find(|p| p.is_file())
}
