//! Comparing a candidate design against a catalog entry.

mod benefit;
mod check;

pub use benefit::BenefitAnnotation;
pub use check::{
    bind, check, check_extension, check_with_registry, find_deviations, self_check, standard_projection, structural_diff,
    trace_inclusion, Binding, BindingSource, CompatibilityReport, ConformanceError, DeviationReport,
};
