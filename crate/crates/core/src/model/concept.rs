use std::collections::BTreeMap;
use std::fmt;

use super::expr::Expr;
use super::value::{Value, ValueLit};

/// The sort of a scalar value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    /// An opaque entity sort such as `Item` or `User`; compared by identity only.
    Entity(String),
    Nat,
    Money,
    Bool,
    Text,
}

impl Sort {
    pub fn from_name(name: &str) -> Sort {
        match name {
            "Nat" => Sort::Nat,
            "Money" => Sort::Money,
            "Bool" => Sort::Bool,
            "Text" => Sort::Text,
            other => Sort::Entity(other.to_string()),
        }
    }

    pub fn entity_name(&self) -> Option<&str> {
        match self {
            Sort::Entity(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Entity(n) => f.write_str(n),
            Sort::Nat => f.write_str("Nat"),
            Sort::Money => f.write_str("Money"),
            Sort::Bool => f.write_str("Bool"),
            Sort::Text => f.write_str("Text"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Scalar(Sort),
    /// A set of entities of the named sort.
    Set(String),
    Map(Sort, Sort),
}

impl ComponentKind {
    /// The sort produced by reading one entry (scalar value, set member, or map value).
    pub fn value_sort(&self) -> Sort {
        match self {
            ComponentKind::Scalar(s) => s.clone(),
            ComponentKind::Set(e) => Sort::Entity(e.clone()),
            ComponentKind::Map(_, v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateComponent {
    pub name: String,
    pub kind: ComponentKind,
    /// Initial value for scalars (`one Nat = 2`).
    pub init: Option<ValueLit>,
    /// Derivation for computed components; derived components are never stored.
    pub derived: Option<Expr>,
}

impl StateComponent {
    pub fn is_derived(&self) -> bool {
        self.derived.is_some()
    }
}

/// Who may fire an action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Initiator {
    User,
    Provider,
    Either,
}

impl Initiator {
    pub fn admits(self, role: Role) -> bool {
        matches!(
            (self, role),
            (Initiator::Either, _)
                | (Initiator::User, Role::User)
                | (Initiator::Provider, Role::Provider)
        )
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Initiator::User => "user",
            Initiator::Provider => "provider",
            Initiator::Either => "either",
        }
    }
}

/// A concrete party firing an action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    User,
    Provider,
}

impl Role {
    pub const ALL: [Role; 2] = [Role::User, Role::Provider];

    pub fn keyword(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Provider => "provider",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub sort: Sort,
}

/// A state update applied by an action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateStmt {
    Insert { set: String, elem: Expr },
    Remove { set: String, elem: Expr },
    Put { map: String, key: Expr, value: Expr },
    Drop { map: String, key: Expr },
    Assign { target: String, value: Expr },
    Clear { target: String },
}

impl UpdateStmt {
    pub fn target(&self) -> &str {
        match self {
            UpdateStmt::Insert { set, .. } | UpdateStmt::Remove { set, .. } => set,
            UpdateStmt::Put { map, .. } | UpdateStmt::Drop { map, .. } => map,
            UpdateStmt::Assign { target, .. } | UpdateStmt::Clear { target } => target,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub initiator: Initiator,
    /// `true` when the action has no `requires` clause.
    pub precondition: Expr,
    pub effects: Vec<UpdateStmt>,
}

impl ActionDef {
    pub fn param_sorts(&self) -> Vec<&Sort> {
        self.params.iter().map(|p| &p.sort).collect()
    }
}

/// A concept: purpose, state schema, and actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptDef {
    pub name: String,
    pub type_params: Vec<String>,
    pub purpose: String,
    pub state: Vec<StateComponent>,
    pub actions: Vec<ActionDef>,
}

impl ConceptDef {
    pub fn component(&self, name: &str) -> Option<&StateComponent> {
        self.state.iter().find(|c| c.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionDef> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Fresh state: scalars at their declared or default initial values, collections empty.
    pub fn initial_state(&self) -> ConceptState {
        let mut out = ConceptState::new();
        for c in self.state.iter().filter(|c| !c.is_derived()) {
            let v = c
                .init
                .as_ref()
                .and_then(|lit| lit.to_value(&c.kind))
                .unwrap_or_else(|| Value::default_for(&c.kind));
            out.insert(c.name.clone(), v);
        }
        out
    }
}

/// Stored (non-derived) component values of one concept instance.
pub type ConceptState = BTreeMap<String, Value>;
