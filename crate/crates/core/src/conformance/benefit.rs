use crate::model::Beneficiary;

/// Who gains from deviations: a default plus per-subject overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenefitAnnotation {
    pub default: Beneficiary,
    pub overrides: Vec<(String, Beneficiary)>,
}

impl BenefitAnnotation {
    pub fn uniform(b: Beneficiary) -> Self {
        BenefitAnnotation { default: b, overrides: Vec::new() }
    }

    pub fn beneficiary_of(&self, subject: &str) -> Beneficiary {
        self.overrides.iter().find(|(s, _)| s == subject).map_or(self.default, |(_, b)| *b)
    }
}

impl Default for BenefitAnnotation {
    fn default() -> Self {
        Self::uniform(Beneficiary::Neutral)
    }
}
