//! Execution of composed apps: state, steps with sync propagation, and bounded trace enumeration.
//!
//! A step checks the trigger's initiator, then its precondition, applies its effects, and fires
//! matching syncs in declaration order. Reactions skip the initiator check but not their own
//! preconditions. Any failure leaves the state untouched.

mod domain;
mod exec;
mod script;
mod state;

pub use domain::EntityDomains;
pub use exec::{
    init_state, initial_state, Domains, Engine, EngineError, StepError, TraceOptions, DEFAULT_STATE_CAP,
    MAX_SYNC_DEPTH,
};
pub use script::{parse_script, ScriptError};
pub use state::{dump_trace, ActionCall, AppState, AppView, Invocation, Step, Trace};

#[cfg(test)]
mod tests;
