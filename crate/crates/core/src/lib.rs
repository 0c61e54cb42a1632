//! Compiler and brute-force deciders for second-order Boolean logic (SO2) and
//! quantified bit-vector formulas with binary-encoded scalars (BV2).
//!
//! The pipeline is:
//!
//! 1. [`so2::parse_so2`] reads a closed prenex SO2 formula.
//! 2. [`reduction::reduce_so2_to_bv2`] compiles it into an equisatisfiable
//!    closed BV2 formula, representing each function symbol by its truth table.
//! 3. [`bv::solve_bv2`] decides the result by quantifier expansion, and
//!    [`so2::decide_so2_bruteforce`] decides the source directly, so the two
//!    verdicts can be cross-checked ([`harness::cross_check`]).
//! 4. [`smtlib::emit_smt2`] serializes BV2 formulas for external solvers.
//!
//! Bit-vector evaluation is generic over the machine word carrying the bits
//! ([`BitWord`]); [`NarrowValue`] is the fast path for widths up to 64 bits and
//! [`WideValue`] handles anything up to the configured width cap.

pub mod bv;
pub mod harness;
mod quantifier;
pub mod reduction;
pub mod smtlib;
pub mod so2;
mod verdict;

pub use bv::word::BitWord;
pub use quantifier::Quantifier;
pub use verdict::{Status, Verdict};

/// Bit-vector value backed by a `u128` word (widths ≤ 64).
pub type NarrowValue = bv::BvValue<u128>;
/// Bit-vector value backed by an arbitrary-precision word.
pub type WideValue = bv::BvValue<num_bigint::BigUint>;
/// Assignment over narrow values.
pub type NarrowAssignment = bv::Assignment<u128>;
/// Assignment over wide values.
pub type WideAssignment = bv::Assignment<num_bigint::BigUint>;
