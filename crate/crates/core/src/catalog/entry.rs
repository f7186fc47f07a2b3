use std::sync::Arc;

use super::files::VariantDecl;
use crate::engine::EntityDomains;
use crate::model::{App, ConceptDef, SyncRule};
use crate::ui::{MappingStandard, UiModel};

/// A named extension design for an entry, loaded and linked.
#[derive(Clone, Debug)]
pub struct Variant {
    pub decl: VariantDecl,
    pub app: App,
    pub ui: Option<UiModel>,
}

/// A resolved catalog entry: the standard concept, its standard composition and UI, the syncs
/// any implementation must keep, and the concept-specific mapping rules.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub concept: Arc<ConceptDef>,
    pub standard_app: App,
    pub standard_ui: Option<UiModel>,
    pub domain: EntityDomains,
    /// Templates written against concept names.
    pub required_syncs: Vec<SyncRule>,
    pub independent: Vec<String>,
    pub mapping: Vec<MappingStandard>,
    pub variants: Vec<Variant>,
}

impl CatalogEntry {
    pub fn concept_name(&self) -> &str {
        &self.concept.name
    }

    pub fn variant(&self, name: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.decl.name == name)
    }
}
