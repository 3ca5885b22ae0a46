//! Gap amplification for clique reconfiguration through a walk product
//! over a certified expander.

mod expander;
mod lemmas;
mod product;

pub use expander::{random_regular, spectral_lambda, ExpanderCert, EIGEN_TOLERANCE};
pub use lemmas::{
    amplification_report, completeness_check, soundness_check, walk_bound_check, AmplificationReport,
    CompletenessCheck, SoundnessCheck, WalkBound,
};
pub use product::{enumerate_walks, product_graph, product_graph_capped, walk_count, WalkGraph, DEFAULT_WALK_CAP};
