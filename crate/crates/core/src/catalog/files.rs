use crate::conformance::BenefitAnnotation;
use crate::engine::EntityDomains;
use crate::model::{Category, Dyad, SyncRule};
use crate::ui::MappingStandard;

/// A documented extension of an entry's standard design.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantDecl {
    pub name: String,
    pub app: String,
    pub ui: Option<String>,
    pub compatible: bool,
}

/// A `.catalog` file as written; paths are relative to the file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryFile {
    pub name: String,
    pub concept: String,
    pub standard_app: String,
    pub standard_ui: Option<String>,
    pub domain: EntityDomains,
    /// Sync templates written against concept names.
    pub syncs: Vec<SyncRule>,
    /// Actions that must not be coupled to other concepts.
    pub independent: Vec<String>,
    pub mapping: Vec<MappingStandard>,
    pub variants: Vec<VariantDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expectation {
    pub category: Category,
    pub subject: String,
    pub dyad: Dyad,
}

/// A `.scenario` file: a candidate design, its benefit annotation, and the expected verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub standard: String,
    pub app: String,
    pub ui: Option<String>,
    pub domain: Option<EntityDomains>,
    pub benefit: BenefitAnnotation,
    pub expected: Vec<Expectation>,
    pub expected_dark: bool,
}
