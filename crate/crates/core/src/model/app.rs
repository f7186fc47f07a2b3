use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::concept::{ComponentKind, ConceptDef, Sort};
use super::expr::Expr;
use super::value::ValueLit;

/// One argument position in a sync trigger or a UI call template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArgPattern {
    /// `_`: matches anything; in UI templates, a value the user chooses.
    Any,
    /// Binds the argument to a name usable in reaction arguments.
    Var(String),
    Lit(ValueLit),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncTrigger {
    pub instance: String,
    pub action: String,
    pub pattern: Vec<ArgPattern>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub instance: String,
    pub action: String,
    pub args: Vec<Expr>,
}

/// `sync NAME when inst.action(pattern) then inst.action(args) ...`
///
/// Reaction arguments are evaluated against the state immediately before the trigger fired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncRule {
    pub name: String,
    pub trigger: SyncTrigger,
    pub reactions: Vec<Reaction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDecl {
    pub name: String,
    pub concept: String,
    /// Standard concept this instance claims to implement, when its concept is named differently.
    pub implements: Option<String>,
    pub init: Vec<(String, ValueLit)>,
}

/// A composed candidate design as written in an `.app` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppModel {
    pub name: String,
    /// Concept files (relative paths) that this app brings into scope.
    pub uses: Vec<String>,
    pub instances: Vec<InstanceDecl>,
    pub syncs: Vec<SyncRule>,
}

impl AppModel {
    pub fn instance(&self, name: &str) -> Option<&InstanceDecl> {
        self.instances.iter().find(|i| i.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("unknown concept {concept} for instance {instance}")]
    UnknownConcept { instance: String, concept: String },
    #[error("{context}: undeclared instance {instance}")]
    UnknownInstance { context: String, instance: String },
    #[error("{context}: {concept} has no action {action}")]
    UnknownAction { context: String, concept: String, action: String },
    #[error("{context}: {concept}.{action} takes {expected} arguments, {found} given")]
    Arity { context: String, concept: String, action: String, expected: usize, found: usize },
    #[error("instance {instance}: init of unknown or derived component {component}")]
    BadInitComponent { instance: String, component: String },
    #[error("instance {instance}: init value for {component} does not fit its declared kind")]
    BadInitValue { instance: String, component: String },
    #[error("duplicate {what} {name}")]
    Duplicate { what: &'static str, name: String },
    #[error("{0}")]
    Other(String),
}

/// Concepts known by name, used to link apps.
#[derive(Clone, Debug, Default)]
pub struct ConceptLibrary {
    concepts: BTreeMap<String, Arc<ConceptDef>>,
}

impl ConceptLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a concept.
    pub fn insert(&mut self, def: ConceptDef) {
        self.concepts.insert(def.name.clone(), Arc::new(def));
    }

    pub fn insert_shared(&mut self, def: Arc<ConceptDef>) {
        self.concepts.insert(def.name.clone(), def);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<ConceptDef>> {
        self.concepts.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.concepts.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

/// An app model whose instances are resolved to concept definitions and whose
/// cross-references have been checked.
#[derive(Clone, Debug)]
pub struct App {
    pub model: AppModel,
    concepts: BTreeMap<String, Arc<ConceptDef>>,
}

impl App {
    pub fn link(model: AppModel, lib: &ConceptLibrary) -> Result<App, LinkError> {
        let mut concepts = BTreeMap::new();
        for inst in &model.instances {
            if concepts.contains_key(&inst.name) {
                return Err(LinkError::Duplicate { what: "instance", name: inst.name.clone() });
            }
            let def = lib.get(&inst.concept).ok_or_else(|| LinkError::UnknownConcept {
                instance: inst.name.clone(),
                concept: inst.concept.clone(),
            })?;
            concepts.insert(inst.name.clone(), def.clone());
        }
        App::from_parts(model, concepts)
    }

    /// Builds an app from already-resolved concepts, running the same checks as [`App::link`].
    pub fn from_parts(
        model: AppModel,
        concepts: BTreeMap<String, Arc<ConceptDef>>,
    ) -> Result<App, LinkError> {
        let app = App { model, concepts };
        app.check()?;
        Ok(app)
    }

    fn check(&self) -> Result<(), LinkError> {
        for inst in &self.model.instances {
            let def = self.concept(&inst.name).ok_or_else(|| LinkError::UnknownConcept {
                instance: inst.name.clone(),
                concept: inst.concept.clone(),
            })?;
            for (comp, lit) in &inst.init {
                let c = def
                    .component(comp)
                    .filter(|c| !c.is_derived())
                    .ok_or_else(|| LinkError::BadInitComponent {
                        instance: inst.name.clone(),
                        component: comp.clone(),
                    })?;
                if lit.to_value(&c.kind).is_none() {
                    return Err(LinkError::BadInitValue {
                        instance: inst.name.clone(),
                        component: comp.clone(),
                    });
                }
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for sync in &self.model.syncs {
            if !names.insert(&sync.name) {
                return Err(LinkError::Duplicate { what: "sync", name: sync.name.clone() });
            }
            let ctx = format!("sync {}", sync.name);
            let t = &sync.trigger;
            self.check_call(&ctx, &t.instance, &t.action, t.pattern.len())?;
            for r in &sync.reactions {
                self.check_call(&ctx, &r.instance, &r.action, r.args.len())?;
            }
        }
        Ok(())
    }

    fn check_call(&self, ctx: &str, instance: &str, action: &str, arity: usize) -> Result<(), LinkError> {
        let def = self.concept(instance).ok_or_else(|| LinkError::UnknownInstance {
            context: ctx.to_string(),
            instance: instance.to_string(),
        })?;
        let act = def.action(action).ok_or_else(|| LinkError::UnknownAction {
            context: ctx.to_string(),
            concept: def.name.clone(),
            action: action.to_string(),
        })?;
        if act.params.len() != arity {
            return Err(LinkError::Arity {
                context: ctx.to_string(),
                concept: def.name.clone(),
                action: action.to_string(),
                expected: act.params.len(),
                found: arity,
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.model.name
    }

    pub fn concept(&self, instance: &str) -> Option<&ConceptDef> {
        self.concepts.get(instance).map(|c| c.as_ref())
    }

    pub fn concept_arc(&self, instance: &str) -> Option<&Arc<ConceptDef>> {
        self.concepts.get(instance)
    }

    /// Instance names in declaration order.
    pub fn instance_names(&self) -> impl Iterator<Item = &str> {
        self.model.instances.iter().map(|i| i.name.as_str())
    }

    /// Concept name an instance presents as: its `implements` target, else its concept's name.
    pub fn presented_name(&self, instance: &str) -> Option<&str> {
        let decl = self.model.instance(instance)?;
        Some(decl.implements.as_deref().unwrap_or(&decl.concept))
    }

    /// Every entity sort mentioned by any instance's state or action parameters.
    pub fn entity_sorts(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        for def in self.concepts.values() {
            for c in &def.state {
                match &c.kind {
                    ComponentKind::Scalar(Sort::Entity(e)) | ComponentKind::Set(e) => {
                        out.insert(e.clone());
                    }
                    ComponentKind::Map(k, v) => {
                        for s in [k, v] {
                            if let Sort::Entity(e) = s {
                                out.insert(e.clone());
                            }
                        }
                    }
                    _ => {}
                }
            }
            for a in &def.actions {
                for p in &a.params {
                    if let Sort::Entity(e) = &p.sort {
                        out.insert(e.clone());
                    }
                }
            }
        }
        out
    }
}
