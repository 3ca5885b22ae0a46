//! A reconfiguration verifier for succinct graph reachability: proofs are
//! two encoded vertices and a pair proof, checked by two code testers and
//! a pair verifier behind random blank probes.

mod bridge;
mod sequences;
mod soundness;
mod verifier;

pub use bridge::{csp_to_verifier, pcrp_to_csp, verifier_to_csp, verifier_to_csp_capped, CspVerifier, DEFAULT_TABLE_CAP};
pub use sequences::{
    bitwise_interpolation, blank_heavy_sequences, completeness_sequence, hop_transitions, hop_walk,
    random_walk_sequence,
};
pub use soundness::{
    check_decoded_steps, decode_sequence, extract_gamma, extract_gamma_decoded, grid_walk, half_distances,
    radius_condition, soundness_audit, AuditReport, AuditWitness, DecodedStep, GammaExtraction, GammaVerdict,
    GridWalk, ModifiedRunCheck, Track, WitnessKind,
};
pub use verifier::{PcrpParams, PcrpProof, PcrpVerifier};

#[cfg(test)]
mod tests;
