//! Declarative UI models, the convention registry, and the mapping checks.
//!
//! Prominence and steps-to-reach are authored numbers, not measured ones.

mod checks;
mod config;
mod model;
mod registry;

pub use checks::{
    check_all, check_consistency, check_conventions, check_correspondence, check_faithfulness, check_reach_parity,
    check_standards, check_symmetry, derive_observed, evoking_instance, identify_evoked, observed_deviations, target,
    Evocation, MappingContext, ObservedAction, ObservedConcept, ObservedSync,
};
pub use config::CheckConfig;
pub use model::*;
pub use registry::{ConventionRegistry, Meaning};
