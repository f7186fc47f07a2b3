use std::fmt;
use std::str::FromStr;

/// Mapping principle a UI violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Principle {
    Correspondence,
    Faithfulness,
    Consistency,
    Symmetry,
    Conventions,
    /// Reach parity between paired actions (easy in, hard out).
    Reach,
    /// A concept-specific mapping standard from the catalog entry.
    Standard,
}

impl Principle {
    pub const ALL: [Principle; 7] = [
        Principle::Correspondence,
        Principle::Faithfulness,
        Principle::Consistency,
        Principle::Symmetry,
        Principle::Conventions,
        Principle::Reach,
        Principle::Standard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Principle::Correspondence => "Correspondence",
            Principle::Faithfulness => "Faithfulness",
            Principle::Consistency => "Consistency",
            Principle::Symmetry => "Symmetry",
            Principle::Conventions => "Conventions",
            Principle::Reach => "Reach",
            Principle::Standard => "Standard",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    MissingAction,
    InitiatorMismatch,
    PreconditionMismatch,
    BehaviorMismatch,
    MissingState,
    MissingSync,
    UnexpectedSync,
    MappingViolation(Principle),
    Extension,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::MissingAction => f.write_str("MissingAction"),
            Category::InitiatorMismatch => f.write_str("InitiatorMismatch"),
            Category::PreconditionMismatch => f.write_str("PreconditionMismatch"),
            Category::BehaviorMismatch => f.write_str("BehaviorMismatch"),
            Category::MissingState => f.write_str("MissingState"),
            Category::MissingSync => f.write_str("MissingSync"),
            Category::UnexpectedSync => f.write_str("UnexpectedSync"),
            Category::MappingViolation(p) => write!(f, "MappingViolation({})", p.name()),
            Category::Extension => f.write_str("Extension"),
        }
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "MissingAction" => Category::MissingAction,
            "InitiatorMismatch" => Category::InitiatorMismatch,
            "PreconditionMismatch" => Category::PreconditionMismatch,
            "BehaviorMismatch" => Category::BehaviorMismatch,
            "MissingState" => Category::MissingState,
            "MissingSync" => Category::MissingSync,
            "UnexpectedSync" => Category::UnexpectedSync,
            "Extension" => Category::Extension,
            other => {
                let inner = other
                    .strip_prefix("MappingViolation(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown deviation category {other}"))?;
                let p = Principle::ALL
                    .into_iter()
                    .find(|p| p.name() == inner)
                    .ok_or_else(|| format!("unknown mapping principle {inner}"))?;
                Category::MappingViolation(p)
            }
        })
    }
}

/// Which pair of concepts disagrees: what the user observes, or what the code implements,
/// against what the user expects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dyad {
    ObservedVsExpected,
    ImplementedVsExpected,
}

impl Dyad {
    pub fn keyword(self) -> &'static str {
        match self {
            Dyad::ObservedVsExpected => "observed",
            Dyad::ImplementedVsExpected => "implemented",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Dyad> {
        match s {
            "observed" => Some(Dyad::ObservedVsExpected),
            "implemented" => Some(Dyad::ImplementedVsExpected),
            _ => None,
        }
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A classified difference between a candidate design and a standard concept.
///
/// Subjects are concept-qualified (`ShoppingCart.add`); sync subjects join the standard-side
/// action and the other action with `~` (`Account.create~Contact.share`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub category: Category,
    pub subject: String,
    pub dyad: Dyad,
    pub evidence: String,
}

impl Deviation {
    pub fn new(category: Category, subject: impl Into<String>, dyad: Dyad, evidence: impl Into<String>) -> Self {
        Deviation { category, subject: subject.into(), dyad, evidence: evidence.into() }
    }

    pub fn key(&self) -> (Dyad, Category, &str) {
        (self.dyad, self.category, &self.subject)
    }
}

/// Orders deviations by dyad, category, then subject, and drops repeats of the same triple.
pub fn normalize(devs: &mut Vec<Deviation>) {
    devs.sort_by(|a, b| a.key().cmp(&b.key()));
    devs.dedup_by(|a, b| a.key() == b.key());
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Beneficiary {
    Provider,
    User,
    Neutral,
}

impl Beneficiary {
    pub fn keyword(self) -> &'static str {
        match self {
            Beneficiary::Provider => "provider",
            Beneficiary::User => "user",
            Beneficiary::Neutral => "neutral",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Beneficiary> {
        match s {
            "provider" => Some(Beneficiary::Provider),
            "user" => Some(Beneficiary::User),
            "neutral" => Some(Beneficiary::Neutral),
            _ => None,
        }
    }
}

/// A deviation judged against the declared beneficiary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarkFinding {
    pub deviation: Deviation,
    pub beneficiary: Beneficiary,
    pub dark: bool,
}

impl DarkFinding {
    /// Darkness needs both a deviation and a provider beneficiary; the latter is never inferred.
    pub fn judge(deviation: Deviation, beneficiary: Beneficiary) -> Self {
        let dark = beneficiary == Beneficiary::Provider;
        DarkFinding { deviation, beneficiary, dark }
    }

    /// `DARK|OK <dyad> <category> <subject> <evidence>`
    pub fn line(&self) -> String {
        let d = &self.deviation;
        let evidence: String = d.evidence.replace(['\n', '\r'], " ");
        format!(
            "{} {} {} {} {}",
            if self.dark { "DARK" } else { "OK" },
            d.dyad,
            d.category,
            d.subject,
            evidence
        )
    }
}
