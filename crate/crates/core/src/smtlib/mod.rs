//! SMT-LIB 2 text for BV2 formulas, and a driver for external solvers.

mod emit;
mod external;
mod parse;

pub use emit::{emit_smt2, EmitError, EmittedScript, BINARY_LITERAL_MAX_WIDTH, LOGIC};
pub use external::{parse_status_line, run_external_solver, ExternalStatus, ExternalVerdict, SolverConfig, SolverError};
pub use parse::{parse_smt2_subset, Smt2Error};
