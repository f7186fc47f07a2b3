use std::collections::BTreeMap;

/// What a convention token or a conventional label is expected to mean.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Meaning {
    Concept(String),
    Action { concept: String, action: String },
    State { concept: String, state: String },
    /// Any action with one of these names, whatever its concept.
    AnyAction(Vec<String>),
    /// Conveys that nothing is committed, such as "Continue".
    NoAction,
}

impl Meaning {
    pub fn action(concept: &str, action: &str) -> Meaning {
        Meaning::Action { concept: concept.to_string(), action: action.to_string() }
    }

    pub fn concept(&self) -> Option<&str> {
        match self {
            Meaning::Concept(c) | Meaning::Action { concept: c, .. } | Meaning::State { concept: c, .. } => Some(c),
            _ => None,
        }
    }

    /// Whether binding to `concept.member` honours this meaning.
    pub fn admits(&self, concept: &str, member: &str, is_action: bool) -> bool {
        match self {
            Meaning::Concept(c) => c == concept,
            Meaning::Action { concept: c, action } => is_action && c == concept && action == member,
            Meaning::State { concept: c, state } => !is_action && c == concept && state == member,
            Meaning::AnyAction(names) => is_action && names.iter().any(|n| n == member),
            Meaning::NoAction => false,
        }
    }
}

impl std::fmt::Display for Meaning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Meaning::Concept(c) => f.write_str(c),
            Meaning::Action { concept, action } => write!(f, "{concept}.{action}"),
            Meaning::State { concept, state } => write!(f, "{concept}.{state}"),
            Meaning::AnyAction(names) => write!(f, "any of {}", names.join("/")),
            Meaning::NoAction => f.write_str("no action"),
        }
    }
}

/// Closed-world table of UI idioms. Unknown tokens and labels carry no meaning.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConventionRegistry {
    pub tokens: BTreeMap<String, Meaning>,
    /// Keyed by lowercase label text.
    pub labels: BTreeMap<String, Meaning>,
}

impl ConventionRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The shipped defaults.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        let dismiss = ["cancel", "exit", "close", "dismiss"].iter().map(|s| s.to_string()).collect();
        r.tokens.insert("x-close".into(), Meaning::AnyAction(dismiss));
        r.tokens.insert("shopping-cart-icon".into(), Meaning::Concept("ShoppingCart".into()));
        r.tokens.insert("add-to-cart-button".into(), Meaning::action("ShoppingCart", "add"));
        r.tokens.insert("quantity-stepper".into(), Meaning::action("ShoppingCart", "changeQuantity"));
        r.tokens.insert("checkout-button".into(), Meaning::action("ShoppingCart", "checkout"));
        r.tokens.insert("download-button".into(), Meaning::action("FileDownload", "download"));
        r.tokens.insert("bell-icon".into(), Meaning::Concept("Notification".into()));
        r.add_label("Add to cart", Meaning::action("ShoppingCart", "add"));
        r.add_label("Checkout", Meaning::action("ShoppingCart", "checkout"));
        r.add_label("Continue", Meaning::NoAction);
        r.add_label("Download", Meaning::action("FileDownload", "download"));
        r
    }

    pub fn add_label(&mut self, label: &str, meaning: Meaning) {
        self.labels.insert(label.trim().to_lowercase(), meaning);
    }

    pub fn token(&self, token: &str) -> Option<&Meaning> {
        self.tokens.get(token)
    }

    pub fn label(&self, label: &str) -> Option<&Meaning> {
        self.labels.get(&label.trim().to_lowercase())
    }
}
