use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::concept::{ComponentKind, Sort};

/// A runtime value held by a state component, bound to a parameter, or produced by an expression.
///
/// `Nat` and `Money` are both exact integers; `Nat` is never negative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    /// An entity-sorted scalar that has not been assigned yet (`none`).
    Unset,
    Bool(bool),
    Nat(i64),
    Money(i64),
    Text(String),
    Entity(String),
    Set(BTreeSet<Value>),
    Map(BTreeMap<Value, Value>),
}

impl Value {
    pub fn entity(id: impl Into<String>) -> Value {
        Value::Entity(id.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Nat(n) | Value::Money(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Equality that treats `Nat` and `Money` as the same number line.
    pub fn loose_eq(&self, other: &Value) -> bool {
        match (self.as_int(), other.as_int()) {
            (Some(a), Some(b)) => a == b,
            _ => self == other,
        }
    }

    /// Re-tags numbers to the declared scalar sort. Other values pass through.
    pub fn coerce_to(self, sort: &Sort) -> Value {
        match (self, sort) {
            (Value::Nat(n), Sort::Money) => Value::Money(n),
            (Value::Money(n), Sort::Nat) if n >= 0 => Value::Nat(n),
            (v, _) => v,
        }
    }

    pub fn coerce_to_kind(self, kind: &ComponentKind) -> Value {
        match (self, kind) {
            (v, ComponentKind::Scalar(s)) => v.coerce_to(s),
            (Value::Map(m), ComponentKind::Map(k, v)) => Value::Map(
                m.into_iter()
                    .map(|(key, val)| (key.coerce_to(k), val.coerce_to(v)))
                    .collect(),
            ),
            (v, _) => v,
        }
    }

    pub fn default_for(kind: &ComponentKind) -> Value {
        match kind {
            ComponentKind::Scalar(s) => Value::default_scalar(s),
            ComponentKind::Set(_) => Value::Set(BTreeSet::new()),
            ComponentKind::Map(_, _) => Value::Map(BTreeMap::new()),
        }
    }

    pub fn default_scalar(sort: &Sort) -> Value {
        match sort {
            Sort::Nat => Value::Nat(0),
            Sort::Money => Value::Money(0),
            Sort::Bool => Value::Bool(false),
            Sort::Text => Value::Text(String::new()),
            Sort::Entity(_) => Value::Unset,
        }
    }

    /// Whether the value inhabits the given scalar sort.
    pub fn fits(&self, sort: &Sort) -> bool {
        matches!(
            (self, sort),
            (Value::Nat(n), Sort::Nat) if *n >= 0
        ) || matches!(
            (self, sort),
            (Value::Nat(_) | Value::Money(_), Sort::Money)
                | (Value::Bool(_), Sort::Bool)
                | (Value::Text(_), Sort::Text)
                | (Value::Entity(_) | Value::Unset, Sort::Entity(_))
        )
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unset => f.write_str("none"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) | Value::Money(n) => write!(f, "{n}"),
            Value::Text(s) => write!(f, "{s:?}"),
            Value::Entity(id) => f.write_str(id),
            Value::Set(items) => {
                f.write_str("{")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Value::Map(entries) => {
                f.write_str("{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A literal value as written in init blocks, domains, and call templates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueLit {
    Int(i64),
    Bool(bool),
    Text(String),
    Entity(String),
    None,
    /// `{}`: an empty set or an empty map, depending on where it lands.
    Empty,
    Set(Vec<ValueLit>),
    Map(Vec<(ValueLit, ValueLit)>),
}

impl ValueLit {
    /// Scalar-only conversion; collections return `None`.
    pub fn to_scalar(&self) -> Option<Value> {
        Some(match self {
            ValueLit::Int(n) if *n >= 0 => Value::Nat(*n),
            ValueLit::Int(n) => Value::Money(*n),
            ValueLit::Bool(b) => Value::Bool(*b),
            ValueLit::Text(s) => Value::Text(s.clone()),
            ValueLit::Entity(id) => Value::Entity(id.clone()),
            ValueLit::None => Value::Unset,
            _ => return None,
        })
    }

    /// Converts the literal into a value of the given component kind, if it fits.
    pub fn to_value(&self, kind: &ComponentKind) -> Option<Value> {
        match (self, kind) {
            (ValueLit::Empty, ComponentKind::Set(_)) => Some(Value::Set(BTreeSet::new())),
            (ValueLit::Empty, ComponentKind::Map(_, _)) => Some(Value::Map(BTreeMap::new())),
            (ValueLit::Set(items), ComponentKind::Set(sort)) => {
                let sort = Sort::Entity(sort.clone());
                let mut out = BTreeSet::new();
                for item in items {
                    let v = item.to_scalar()?;
                    if !v.fits(&sort) {
                        return None;
                    }
                    out.insert(v);
                }
                Some(Value::Set(out))
            }
            (ValueLit::Map(entries), ComponentKind::Map(ks, vs)) => {
                let mut out = BTreeMap::new();
                for (k, v) in entries {
                    let k = k.to_scalar()?;
                    let v = v.to_scalar()?;
                    if !k.fits(ks) || !v.fits(vs) {
                        return None;
                    }
                    out.insert(k.coerce_to(ks), v.coerce_to(vs));
                }
                Some(Value::Map(out))
            }
            (lit, ComponentKind::Scalar(sort)) => {
                let v = lit.to_scalar()?;
                v.fits(sort).then(|| v.coerce_to(sort))
            }
            _ => None,
        }
    }
}
