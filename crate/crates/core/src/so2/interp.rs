use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Truth table of an `arity`-ary Boolean function.
///
/// Entry `k` holds `f(b_{n-1}, ..., b_0)` where `k = Σ 2^i · b_i`, so the
/// last argument selects the least significant index bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: u32,
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("table for arity {arity} must have {expected} entries, got {found}")]
    TableLength {
        arity: u32,
        expected: u64,
        found: usize,
    },
    #[error("arity {0} is too large for an explicit truth table")]
    ArityTooLarge(u32),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("symbol `{0}` is defined more than once")]
    Duplicate(String),
}

/// Largest arity for which an explicit table is materialized (2^24 entries).
const MAX_TABLE_ARITY: u32 = 24;

impl TruthTable {
    pub fn from_bits(arity: u32, bits: Vec<bool>) -> Result<Self, InterpretationError> {
        if arity > MAX_TABLE_ARITY {
            return Err(InterpretationError::ArityTooLarge(arity));
        }
        let expected = 1u64 << arity;
        if bits.len() as u64 != expected {
            return Err(InterpretationError::TableLength { arity, expected, found: bits.len() });
        }
        Ok(Self { arity, bits })
    }

    /// The table whose entry `k` is bit `k` of `index`. Requires `2^arity ≤ 128`.
    pub fn from_index(arity: u32, index: u128) -> Self {
        assert!(arity <= 7, "from_index supports tables of at most 128 entries");
        let bits = (0..1usize << arity).map(|k| (index >> k) & 1 == 1).collect();
        Self { arity, bits }
    }

    pub fn constant(arity: u32, value: bool) -> Result<Self, InterpretationError> {
        if arity > MAX_TABLE_ARITY {
            return Err(InterpretationError::ArityTooLarge(arity));
        }
        Ok(Self { arity, bits: vec![value; 1usize << arity] })
    }

    /// Parses a bit string written most significant entry first, so the
    /// leftmost character is `f(1, ..., 1)` and the rightmost is `f(0, ..., 0)`.
    pub fn from_msb_str(arity: u32, s: &str) -> Result<Self, InterpretationError> {
        let bits = s
            .chars()
            .rev()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(InterpretationError::Syntax {
                    line: 0,
                    message: format!("invalid table character `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(arity, bits)
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Entry at `index = Σ 2^i · b_i`.
    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    /// Looks up `f(args[0], ..., args[n-1])`; `args[0]` is the most significant
    /// index bit.
    pub fn apply(&self, args: &[bool]) -> bool {
        debug_assert_eq!(args.len(), self.arity as usize);
        let index = args.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        self.bits[index]
    }

    /// Entries with index 0 first.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for TruthTable {
    /// Most significant entry first, the format read by [`TruthTable::from_msb_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Assignment of truth tables to symbol names.
pub type Interpretation = BTreeMap<String, TruthTable>;

/// Reads an interpretation file: one `name:arity=bits` entry per line, bits
/// most significant first. Blank lines and `#` comments are ignored.
pub fn parse_interpretation(text: &str) -> Result<Interpretation, InterpretationError> {
    let mut out = Interpretation::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: &str| InterpretationError::Syntax { line, message: message.into() };
        let (head, table) = content
            .split_once('=')
            .ok_or_else(|| syntax("expected `name:arity=bits`"))?;
        let (name, arity) = head
            .split_once(':')
            .ok_or_else(|| syntax("expected `name:arity` before `=`"))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax("invalid symbol name"));
        }
        let arity: u32 = arity.trim().parse().map_err(|_| syntax("invalid arity"))?;
        let table = TruthTable::from_msb_str(arity, table.trim()).map_err(|e| match e {
            InterpretationError::Syntax { message, .. } => InterpretationError::Syntax { line, message },
            other => other,
        })?;
        if out.insert(name.to_string(), table).is_some() {
            return Err(InterpretationError::Duplicate(name.to_string()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_layout() {
        let t = TruthTable::from_msb_str(3, "10010110").unwrap();
        // rightmost character is f(0,0,0)
        assert!(!t.apply(&[false, false, false]));
        assert!(t.apply(&[true, true, true]));
        assert!(t.apply(&[false, false, true]));
        assert_eq!(t.to_string(), "10010110");
    }

    #[test]
    fn from_index_matches_bit_positions() {
        let t = TruthTable::from_index(2, 0b0100);
        assert_eq!(t.bits(), &[false, false, true, false]);
        assert!(t.apply(&[true, false]));
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert_eq!(
            TruthTable::from_msb_str(2, "101"),
            Err(InterpretationError::TableLength { arity: 2, expected: 4, found: 3 })
        );
        assert!(TruthTable::from_msb_str(0, "1").is_ok());
    }

    #[test]
    fn interpretation_file() {
        let text = "# tables\nf:3=10010110\np:0=1\n\n g : 1 = 10  # trailing\n";
        let interp = parse_interpretation(text).unwrap();
        assert_eq!(interp.len(), 3);
        assert!(interp["p"].get(0));
        assert!(!interp["g"].get(0));
        assert!(interp["g"].get(1));
    }

    #[test]
    fn interpretation_errors() {
        assert!(matches!(
            parse_interpretation("f:1=10\nf:1=01"),
            Err(InterpretationError::Duplicate(_))
        ));
        assert!(matches!(
            parse_interpretation("f=10"),
            Err(InterpretationError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_interpretation("\nf:1=1x"),
            Err(InterpretationError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_interpretation("f:2=10"),
            Err(InterpretationError::TableLength { .. })
        ));
    }
}
