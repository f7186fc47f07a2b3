//! Concept specifications for dark-pattern detection.
//!
//! A design is described as a composition of concepts (state plus actions) joined by syncs,
//! optionally with a declarative UI. The toolkit simulates such designs, compares them against
//! catalog standards, and reports each deviation together with whether it is dark.

pub mod catalog;
pub mod conformance;
pub mod engine;
pub mod lang;
pub mod model;
pub mod ui;

pub use model::*;
