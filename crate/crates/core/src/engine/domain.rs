use std::collections::{BTreeMap, BTreeSet};

/// Finite value sets used to enumerate action arguments.
///
/// Entity sorts must be listed explicitly. `Nat` defaults to `{0, 1, 2}`; `Money` defaults to
/// amounts harvested from the app's initial state and literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntityDomains {
    pub entities: BTreeMap<String, Vec<String>>,
    pub nat: Option<Vec<i64>>,
    pub money: Option<Vec<i64>>,
    pub text: Option<Vec<String>>,
}

impl EntityDomains {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, sort: &str, ids: &[&str]) -> Self {
        self.entities.insert(sort.to_string(), ids.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn entity(&self, sort: &str) -> Option<&[String]> {
        self.entities.get(sort).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.nat.is_none() && self.money.is_none() && self.text.is_none()
    }

    /// Entries of `other` take precedence.
    pub fn overlay(&self, other: &EntityDomains) -> EntityDomains {
        let mut out = self.clone();
        for (k, v) in &other.entities {
            out.entities.insert(k.clone(), v.clone());
        }
        if other.nat.is_some() {
            out.nat = other.nat.clone();
        }
        if other.money.is_some() {
            out.money = other.money.clone();
        }
        if other.text.is_some() {
            out.text = other.text.clone();
        }
        out
    }

    pub fn sorts(&self) -> BTreeSet<&str> {
        self.entities.keys().map(String::as_str).collect()
    }
}
