//! The built-in catalog of standard concepts, the loader, and the scenario corpus.
//!
//! Shipped files are compiled in; a path that is missing on disk falls back to the shipped
//! file with the same name, so designs can `use "shoppingcart.concept"` from anywhere.

mod embedded;
mod entry;
mod files;
mod loader;
mod runner;

pub use embedded::FILES;
pub use entry::{CatalogEntry, Variant};
pub use files::{EntryFile, Expectation, Scenario, VariantDecl};
pub use loader::{
    builtin_file, builtin_files, disk_files, load_builtin_catalog, load_catalog_dir, Catalog, LoadError, Loader,
    Location,
};
pub use runner::{run_builtin_corpus, run_corpus, run_locations, run_scenario, CorpusReport, ScenarioOutcome};
