use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::so2::{FunctionSymbol, So2Formula};
use crate::Quantifier;

/// Relative weights of matrix node kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeWeights {
    pub apply: u32,
    pub and: u32,
    pub not: u32,
    pub literal: u32,
}

impl Default for NodeWeights {
    fn default() -> Self {
        Self { apply: 2, and: 1, not: 1, literal: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub max_arity: u32,
    /// Quantified symbols per formula, drawn from `min_symbols..=max_symbols`
    /// and cut short when `max_table_bits` is used up.
    pub min_symbols: usize,
    pub max_symbols: usize,
    pub max_depth: u32,
    /// Cap on `Σ 2^ar(f)` over the prefix, which bounds both brute-force searches.
    pub max_table_bits: u64,
    pub weights: NodeWeights,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_arity: 3,
            min_symbols: 1,
            max_symbols: 3,
            max_depth: 4,
            max_table_bits: 24,
            weights: NodeWeights::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

const FUNCTION_NAMES: [&str; 4] = ["f", "g", "h", "k"];
const PROPOSITION_NAMES: [&str; 4] = ["p", "q", "r", "s"];

fn name(pool: &[&str], i: usize) -> String {
    pool.get(i).map_or_else(|| format!("{}{i}", pool[0]), |s| s.to_string())
}

/// Draws a closed prenex formula. The same configuration always yields the
/// same formula.
///
/// Proper functions are quantified before propositions, so the result passes
/// strict validation. The symbol count is clamped to at least one and each
/// arity is lowered until the table-bit cap holds; literals stand in for
/// leaves when the prefix has no propositions.
pub fn gen_random_so2(cfg: &GeneratorConfig) -> So2Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lo = cfg.min_symbols.max(1);
    let count = rng.gen_range(lo..=cfg.max_symbols.max(lo));

    let mut arities = Vec::with_capacity(count);
    let mut bits = 0u64;
    for _ in 0..count {
        let mut arity = rng.gen_range(0..=cfg.max_arity);
        while arity > 0 && bits + (1u64 << arity) > cfg.max_table_bits {
            arity -= 1;
        }
        if !arities.is_empty() && bits + (1u64 << arity) > cfg.max_table_bits {
            break;
        }
        bits += 1u64 << arity;
        arities.push(arity);
    }
    arities.sort_unstable_by(|a, b| b.cmp(a));

    let (mut nf, mut np) = (0, 0);
    let symbols: Vec<FunctionSymbol> = arities
        .iter()
        .map(|&a| {
            let n = if a > 0 {
                nf += 1;
                name(&FUNCTION_NAMES, nf - 1)
            } else {
                np += 1;
                name(&PROPOSITION_NAMES, np - 1)
            };
            FunctionSymbol::new(n, a)
        })
        .collect();
    let prefix = symbols
        .iter()
        .map(|s| {
            let q = if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall };
            (q, s.clone())
        })
        .collect();

    let mut g = MatrixGen { rng: &mut rng, symbols: &symbols, weights: cfg.weights };
    let matrix = g.node(cfg.max_depth);
    So2Formula::with_prefix(prefix, matrix)
}

/// Draws a quantifier-free formula over the given symbols.
pub fn gen_random_matrix(symbols: &[FunctionSymbol], depth: u32, seed: u64, weights: NodeWeights) -> So2Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixGen { rng: &mut rng, symbols, weights }.node(depth)
}

struct MatrixGen<'a> {
    rng: &'a mut ChaCha8Rng,
    symbols: &'a [FunctionSymbol],
    weights: NodeWeights,
}

impl MatrixGen<'_> {
    fn leaf(&mut self) -> So2Formula {
        let props: Vec<&FunctionSymbol> = self.symbols.iter().filter(|s| s.is_proposition()).collect();
        let w = [self.weights.apply * u32::from(!props.is_empty()), self.weights.literal.max(1)];
        let dist = WeightedIndex::new(w).expect("literal weight is positive");
        if dist.sample(self.rng) == 0 {
            let p = props[self.rng.gen_range(0..props.len())];
            So2Formula::apply(p.clone(), Vec::new())
        } else {
            So2Formula::Lit(self.rng.gen_bool(0.5))
        }
    }

    fn node(&mut self, depth: u32) -> So2Formula {
        if depth == 0 {
            return self.leaf();
        }
        let w = &self.weights;
        let weights = [w.apply * u32::from(!self.symbols.is_empty()), w.and, w.not, w.literal];
        let Ok(dist) = WeightedIndex::new(weights) else {
            return self.leaf();
        };
        match dist.sample(self.rng) {
            0 => {
                let f = self.symbols[self.rng.gen_range(0..self.symbols.len())].clone();
                let args = (0..f.arity).map(|_| self.node(depth - 1)).collect();
                So2Formula::apply(f, args)
            }
            1 => {
                let a = self.node(depth - 1);
                So2Formula::and(a, self.node(depth - 1))
            }
            2 => So2Formula::not(self.node(depth - 1)),
            _ => self.leaf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so2::{validate_prenex_closed, ValidateOptions};

    #[test]
    fn deterministic_per_seed() {
        let cfg = GeneratorConfig::default().with_seed(42);
        assert_eq!(gen_random_so2(&cfg).to_string(), gen_random_so2(&cfg).to_string());
        let texts: std::collections::BTreeSet<String> =
            (0..20).map(|s| gen_random_so2(&cfg.with_seed(s)).to_string()).collect();
        assert!(texts.len() > 10);
    }

    #[test]
    fn arity_zero_gives_qbf() {
        let cfg = GeneratorConfig { max_arity: 0, ..GeneratorConfig::default() };
        for seed in 0..50 {
            let phi = gen_random_so2(&cfg.with_seed(seed));
            assert!(phi.split_prefix().0.iter().all(|(_, s)| s.arity == 0));
        }
    }

    #[test]
    fn outputs_are_valid_and_within_budget() {
        let cfg = GeneratorConfig::default();
        for seed in 0..200 {
            let phi = gen_random_so2(&cfg.with_seed(seed));
            assert!(validate_prenex_closed(&phi, ValidateOptions::default()).is_ok(), "{phi}");
            let bits: u64 = phi.split_prefix().0.iter().map(|(_, s)| 1u64 << s.arity).sum();
            assert!(bits <= cfg.max_table_bits);
        }
    }
}
