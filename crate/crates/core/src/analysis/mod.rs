//! Contraction constants and randomized checks of the message bounds.

pub mod constants;
pub mod lemmas;
pub mod sampler;
pub mod verify;

pub use constants::{
    bound_lemma_bb, bound_lemma_prod, bound_lemma_prod_exact, bound_lemma_prodnew, g, kappa, kappa_q4b2,
    min_contracting_q, solve_c, threshold_q, ContractionRecord,
};
pub use lemmas::{LemmaId, Instance};
pub use sampler::SamplerConfig;
pub use verify::{verify_lemma, verify_lemma_with_rng, VerificationReport, VerifyConfig, Witness};
