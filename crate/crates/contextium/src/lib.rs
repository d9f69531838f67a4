//! State-independent contextuality over n-qubit Pauli observables.
//!
//! The library enumerates all measurement contexts (trios of pairwise
//! compatible Pauli strings whose product is plus or minus the identity),
//! verifies the closed-form context counts, computes noncontextual
//! hidden-variable bounds for the resulting inequalities, and simulates
//! sequential measurements with readout noise to locate the violation
//! threshold empirically.
//!
//! One finding worth knowing up front: the counting-argument bound
//! `2 S(n) - N(n)` for the full-context inequality is exact at n = 2 but
//! falsified at n = 3, where local search reproducibly finds verified
//! assignments satisfying 252 > S(3) = 225 contexts. Solvers flag such
//! exceedances in their reports; see [`solver`] for details.
//!
//! Modules:
//! - [`pauli`]: bitmask Pauli-string algebra with phase tracking.
//! - [`context`]: context enumeration, closed-form counts, KS tables, and
//!   the n=3 symmetry classes.
//! - [`inequality`]: the canonical inequalities (Peres-Mermin, its tested
//!   variant, the 15-context two-qubit inequality, and the full n-qubit
//!   family).
//! - [`solver`]: exact and stochastic MAX-XOR solvers for the noncontextual
//!   bound.
//! - [`sim`]: dense-matrix quantum engine with Lueders updates and a
//!   readout-flip noise model.
//! - [`report`]: exact-rational scaling tables (N, S, b, epsilon, D).

pub mod context;
pub mod inequality;
pub mod pauli;
pub mod report;
pub mod sim;
pub mod solver;

pub use context::{Context, KSTable, SymmetryClass};
pub use inequality::Inequality;
pub use pauli::{Phase, PauliString};
pub use solver::{Assignment, SolveReport};

use thiserror::Error as ThisError;

/// Error type shared across the crate.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid character '{character}' at position {position} (expected I, X, Y, or Z)")]
    InvalidCharacter { character: char, position: usize },
    #[error("string length {len} out of range (1..={})", pauli::MAX_QUBITS)]
    Length { len: usize },
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{operation} supports n in {min}..={max}, got {n}")]
    Capability {
        operation: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },
    #[error("assignment is missing a value for observable {observable}")]
    IncompleteAssignment { observable: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("problem too large for exact solving ({variables} variables > {cap}); use local search")]
    ExactTooLarge { variables: usize, cap: usize },
    #[error("state corrupted: measurement probability {probability} outside [0, 1]")]
    StateCorruption { probability: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
