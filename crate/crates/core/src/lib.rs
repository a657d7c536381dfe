//! Exact Steiner tree solving for graphs given by k-clique-expressions.
//!
//! The crate has three layers:
//!
//! * [`expr`] parses, validates, generates and realizes clique-expressions;
//! * [`pattern`], [`cspat`] and [`solver`] implement the connectivity-pattern
//!   algebra and the randomized `O*(3^k)` dynamic program built on it;
//! * [`oracle`] and [`analysis`] provide brute-force ground truth and the
//!   consistency-matrix checks backing the algebra.
//!
//! The solver is one-sided-error Monte Carlo: a YES answer always carries a
//! witnessing table entry and is exact; a solvable instance is answered YES
//! with probability at least one half per repeat.

use thiserror::Error as ThisError;

pub mod analysis;
pub mod cspat;
pub mod expr;
pub mod oracle;
pub mod pattern;
pub mod selftest;
pub mod solver;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("memory limit: {0}")]
    Memory(String),
    #[error("pattern error: {0}")]
    Pattern(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub use expr::{gen_random_instance, node_count, parse_instance, realize, Instance, LabeledGraph};
pub use pattern::{Label, Pattern, PatternSet};
pub use solver::{decide, run_dp, sample_weights, solve, solve_with, SolveReport};
