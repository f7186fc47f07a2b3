use super::Milli;
use crate::engine::DEFAULT_STATE_CAP;

/// Every tunable threshold used by the checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    /// Trace depth for behavioural inclusion.
    pub depth: usize,
    /// An action is observed only if reachable within this many steps.
    pub max_steps: u32,
    pub min_prominence: Milli,
    /// Largest tolerated prominence gap between paired controls.
    pub epsilon: Milli,
    /// Default ratio for reach parity rules that do not state one.
    pub max_ratio: Milli,
    /// Registered idioms needed before a UI evokes a concept.
    pub evoke_k: usize,
    pub state_cap: usize,
    /// Depth of the state sample used by value-dependent UI checks.
    pub sample_depth: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            depth: 3,
            max_steps: 5,
            min_prominence: Milli(50),
            epsilon: Milli(200),
            max_ratio: Milli(2000),
            evoke_k: 2,
            state_cap: DEFAULT_STATE_CAP,
            sample_depth: 2,
        }
    }
}
