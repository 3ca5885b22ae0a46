//! Circuits as succinct graphs: `S: {0,1}^n → {0,1}^n` has an edge from `x`
//! to `S(x)`, and the question is whether `1^n` is reachable from `0^n`.

pub mod circuit;
pub mod tm;
pub mod token;

pub use circuit::{
    decide_reachability, decide_reachability_capped, reachability_path, BoolCircuit, CircuitBuilder, Gate,
    Reachability,
};
pub use tm::{simulate_tm, tm_to_circuit, Config, Move, Outcome, TmSpec, Transition};
pub use token::validate_token_sequence;
