//! Reconfiguration problems, probabilistically checkable reconfiguration
//! proofs, and the reductions between them, with exhaustive oracles for
//! checking every construction on small instances.

pub mod amplify;
pub mod bits;
pub mod codes;
pub mod csp;
pub mod dimacs;
pub mod error;
pub mod graph;
pub mod pcpp;
pub mod pcrp;
pub mod solve;
pub mod succinct;
pub mod value;
pub mod verifier;
pub mod zoo;

pub use bits::BitString;
pub use codes::{Hadamard, LocallyTestableCode, TernaryWord, BOT};
pub use csp::{cnf_to_csp, Assignment, Cnf, Constraint, ConstraintSystem, ReconfigSequence, Symbol, Word};
pub use error::{Error, Result};
pub use graph::Graph;
pub use succinct::BoolCircuit;
pub use value::{Rational, Value};
pub use verifier::Verifier;

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
