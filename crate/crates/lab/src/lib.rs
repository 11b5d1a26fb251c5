//! Experiments on maximal representations of surface groups: length
//! vectors over curve systems, quasi-isometry fits between `tr_h` and
//! `tr_ρ`, orbit probes under Dehn twists, and a suite of checks for the
//! comparison lemmas behind properness.
//!
//! Everything here works on the `f64` aliases of the core crate.

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

mod centred;
mod error;
mod lemmas;
mod lengths;
mod orbit;
mod qi;
mod seeds;
mod words;

pub use centred::{centred_case, congruence_distance, CentredCase};
pub use error::LabError;
pub use lemmas::{
    attainment_suite, causal_suite, cone_suite, lemma_suite, random_causal_curve, AttainmentCase, AttainmentReport,
    CausalSuiteReport, ComparisonFit, ConeCase, ConeReport, Failure, LemmaConfig, LemmaReport,
};
pub use lengths::{length_vector_h, length_vector_rep, upper_lipschitz, LengthSource, LengthVector, UpperLipschitz};
pub use orbit::{orbit_probe, OrbitProbe, MAX_WORD_LETTERS};
pub use qi::{fit_qi, qi_estimate, QiEstimate, QiSample};
pub use seeds::task_rng;
pub use words::{sample_words, WordSampler};
