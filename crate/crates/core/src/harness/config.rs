use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use super::GeneratorConfig;
use crate::bv::SolveBudget;
use crate::smtlib::SolverConfig;
use crate::so2::So2Config;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: `{key}` is set twice")]
    Duplicate { line: usize, key: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
}

/// Reads flat `key = value` lines. Blank lines and lines starting with `#`
/// are ignored; whitespace around keys and values is trimmed.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = k.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        if out.insert(key.to_string(), v.trim().to_string()).is_some() {
            return Err(ConfigError::Duplicate { line: i + 1, key: key.to_string() });
        }
    }
    Ok(out)
}

/// Every tunable of the harness in one place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessConfig {
    pub generator: GeneratorConfig,
    pub so2: So2Config,
    pub budget: SolveBudget,
    pub solver: Option<SolverConfig>,
    pub instances: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorConfig::default(),
            so2: So2Config::default(),
            budget: SolveBudget::default(),
            solver: None,
            instances: 100,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: value.into() })
}

fn flag(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError::BadValue { key: key.into(), value: value.into() }),
    }
}

impl HarnessConfig {
    pub const KEYS: &'static [&'static str] = &[
        "seed", "instances", "max_arity", "min_symbols", "max_symbols", "max_depth", "max_table_bits",
        "weight_apply", "weight_and", "weight_not", "weight_literal", "arity_cap", "table_bit_budget",
        "relax_order", "width_cap", "quantified_bits", "solver", "solver_args", "timeout_ms",
    ];

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (k, v) in parse_config(text)? {
            cfg.set(&k, &v)?;
        }
        Ok(cfg)
    }

    fn solver_mut(&mut self) -> &mut SolverConfig {
        self.solver.get_or_insert_with(|| SolverConfig::new("z3"))
    }

    /// Sets one key. Later calls override earlier ones, so command-line flags
    /// applied after the file take precedence.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let g = &mut self.generator;
        match key {
            "seed" => g.seed = num(key, value)?,
            "instances" => self.instances = num(key, value)?,
            "max_arity" => g.max_arity = num(key, value)?,
            "min_symbols" => g.min_symbols = num(key, value)?,
            "max_symbols" => g.max_symbols = num(key, value)?,
            "max_depth" => g.max_depth = num(key, value)?,
            "max_table_bits" => g.max_table_bits = num(key, value)?,
            "weight_apply" => g.weights.apply = num(key, value)?,
            "weight_and" => g.weights.and = num(key, value)?,
            "weight_not" => g.weights.not = num(key, value)?,
            "weight_literal" => g.weights.literal = num(key, value)?,
            "arity_cap" => self.so2.arity_cap = num(key, value)?,
            "table_bit_budget" => self.so2.table_bit_budget = num(key, value)?,
            "relax_order" => self.so2.relax_order = flag(key, value)?,
            "width_cap" => self.budget.width_cap = num(key, value)?,
            "quantified_bits" => self.budget.quantified_bits = num(key, value)?,
            "solver" => {
                if value.is_empty() {
                    self.solver = None;
                } else {
                    self.solver_mut().program = value.into();
                }
            }
            "solver_args" => self.solver_mut().args = value.split_whitespace().map(String::from).collect(),
            "timeout_ms" => {
                let ms: u64 = num(key, value)?;
                self.solver_mut().timeout = Duration::from_millis(ms);
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let m = parse_config("# budget\nseed = 7\n\n  max_depth=2  \nsolver = /usr/bin/z3\n").unwrap();
        assert_eq!(m["seed"], "7");
        assert_eq!(m["max_depth"], "2");
        assert_eq!(m["solver"], "/usr/bin/z3");
    }

    #[test]
    fn rejects_malformed_text() {
        assert_eq!(parse_config("seed 7"), Err(ConfigError::Syntax { line: 1 }));
        assert_eq!(parse_config(" = 3"), Err(ConfigError::Syntax { line: 1 }));
        assert!(matches!(parse_config("a=1\na=2"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(HarnessConfig::from_text("colour = red"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(HarnessConfig::from_text("seed = -1"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn typed_settings() {
        let mut cfg = HarnessConfig::from_text("seed=9\nrelax_order=true\ntimeout_ms=250\nsolver_args=-smt2 -q").unwrap();
        assert_eq!(cfg.generator.seed, 9);
        assert!(cfg.so2.relax_order);
        let s = cfg.solver.clone().unwrap();
        assert_eq!(s.timeout, Duration::from_millis(250));
        assert_eq!(s.args, vec!["-smt2", "-q"]);
        cfg.set("seed", "10").unwrap();
        assert_eq!(cfg.generator.seed, 10);
        for key in HarnessConfig::KEYS {
            assert!(!matches!(cfg.clone().set(key, "x"), Err(ConfigError::UnknownKey(_))), "{key}");
        }
    }
}
