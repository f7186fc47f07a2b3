use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::model::{App, ConceptState, ConceptView, EvalError, Role, StatePath, StateSource, Value};

/// Stored state of every instance in an app, keyed by instance name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AppState {
    pub instances: BTreeMap<String, ConceptState>,
}

impl AppState {
    pub fn instance(&self, name: &str) -> Option<&ConceptState> {
        self.instances.get(name)
    }

    pub fn get(&self, instance: &str, component: &str) -> Option<&Value> {
        self.instances.get(instance)?.get(component)
    }

    /// Hex SHA-256 over a canonical rendering of the state.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (inst, st) in &self.instances {
            h.update(inst.as_bytes());
            h.update([0]);
            for (comp, v) in st {
                h.update(comp.as_bytes());
                h.update([1]);
                h.update(format!("{v:?}").as_bytes());
                h.update([2]);
            }
            h.update([3]);
        }
        hex::encode(h.finalize())
    }
}

impl fmt::Display for AppState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (inst, st) in &self.instances {
            for (comp, v) in st {
                writeln!(f, "{inst}.{comp} = {v}")?;
            }
        }
        Ok(())
    }
}

/// App state seen through the app's concepts; paths must be qualified by instance name.
pub struct AppView<'a> {
    pub app: &'a App,
    pub state: &'a AppState,
}

impl<'a> AppView<'a> {
    pub fn new(app: &'a App, state: &'a AppState) -> Self {
        AppView { app, state }
    }

    /// Reads one component of one instance, computing derived components.
    pub fn read(&self, instance: &str, component: &str) -> Result<Value, EvalError> {
        let path = StatePath::qualified(instance, component);
        self.component(&path).map(Cow::into_owned)
    }
}

impl StateSource for AppView<'_> {
    fn component(&self, path: &StatePath) -> Result<Cow<'_, Value>, EvalError> {
        let inst = path.instance.as_deref().ok_or_else(|| EvalError::UnknownComponent(path.to_string()))?;
        let def = self.app.concept(inst).ok_or_else(|| EvalError::UnknownComponent(path.to_string()))?;
        let st = self.state.instance(inst).ok_or_else(|| EvalError::UnknownComponent(path.to_string()))?;
        let view = ConceptView::new(def, st);
        let local = StatePath::local(path.component.clone());
        view.component(&local).map(|c| Cow::Owned(c.into_owned()))
    }
}

/// A request to run one action.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionCall {
    pub instance: String,
    pub action: String,
    pub args: Vec<Value>,
    pub role: Role,
}

impl ActionCall {
    pub fn new(instance: &str, action: &str, args: Vec<Value>, role: Role) -> Self {
        ActionCall { instance: instance.to_string(), action: action.to_string(), args, role }
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, instance: &str, action: &str, args: &[Value]) -> fmt::Result {
    write!(f, "{instance}.{action}(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for ActionCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.role)?;
        write_call(f, &self.instance, &self.action, &self.args)
    }
}

/// An action run as a sync reaction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Invocation {
    pub instance: String,
    pub action: String,
    pub args: Vec<Value>,
}

impl fmt::Display for Invocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_call(f, &self.instance, &self.action, &self.args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub call: ActionCall,
    /// Every reaction fired, in firing order.
    pub reactions: Vec<Invocation>,
    pub digest: String,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => [", self.call)?;
        for (i, r) in self.reactions.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

pub type Trace = Vec<Step>;

/// One step per line: `<role> <instance>.<action>(<args>) => [<reactions>]`.
pub fn dump_trace(trace: &[Step]) -> String {
    trace.iter().map(|s| format!("{s}\n")).collect()
}
