use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::domain::EntityDomains;
use super::state::{ActionCall, AppState, AppView, Invocation, Step, Trace};
use crate::model::{
    eval, eval_bool, ActionDef, App, ArgPattern, Bindings, ComponentKind, ConceptDef, ConceptState, ConceptView,
    EvalError, Role, Sort, UpdateStmt, Value,
};

/// Sync closures deeper than this fail with [`StepError::CycleDetected`].
pub const MAX_SYNC_DEPTH: usize = 32;
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("precondition of {action} failed")]
    PreconditionFailed { action: String, detail: Option<String> },
    #[error("{role} may not initiate {action}")]
    InitiatorForbidden { action: String, role: Role },
    #[error("sync closure exceeded depth {MAX_SYNC_DEPTH}")]
    CycleDetected,
    #[error("unknown instance {0}")]
    UnknownInstance(String),
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("{action} expects {expected} arguments, got {found}")]
    Arity { action: String, expected: usize, found: usize },
    #[error("argument {index} of {action} is not a {sort}")]
    ArgSort { action: String, index: usize, sort: Sort },
    #[error("effect of {action} failed: {source}")]
    Effect { action: String, source: EvalError },
    #[error("reaction argument in sync {sync} failed: {source}")]
    ReactionArg { sync: String, source: EvalError },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("no domain for entity sort {0}")]
    MissingDomain(String),
    #[error("trace enumeration exceeded the cap of {0} states")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Finite value sets per sort, resolved for one app.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domains {
    entities: BTreeMap<String, Vec<Value>>,
    nat: Vec<Value>,
    money: Vec<Value>,
    text: Vec<Value>,
}

impl Domains {
    pub fn values(&self, sort: &Sort) -> &[Value] {
        const BOOLS: [Value; 2] = [Value::Bool(false), Value::Bool(true)];
        match sort {
            Sort::Entity(e) => self.entities.get(e).map_or(&[], Vec::as_slice),
            Sort::Nat => &self.nat,
            Sort::Money => &self.money,
            Sort::Bool => &BOOLS,
            Sort::Text => &self.text,
        }
    }

    /// Every argument tuple for the given parameter sorts, in lexicographic domain order.
    pub fn tuples(&self, sorts: &[&Sort]) -> Vec<Vec<Value>> {
        let mut out = vec![Vec::new()];
        for s in sorts {
            let vals = self.values(s);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }
}

fn collect_money(v: &Value, kind: &ComponentKind, out: &mut BTreeSet<i64>) {
    match (v, kind) {
        (Value::Money(n), _) => {
            out.insert(*n);
        }
        (Value::Map(m), ComponentKind::Map(_, Sort::Money)) => {
            out.extend(m.values().filter_map(Value::as_int));
        }
        _ => {}
    }
}

/// Executes one app over a finite domain.
#[derive(Clone, Debug)]
pub struct Engine<'a> {
    pub app: &'a App,
    pub domains: Domains,
    init: AppState,
}

impl<'a> Engine<'a> {
    /// Resolves domains and the initial state. Every entity sort used by the app needs a domain.
    pub fn new(app: &'a App, given: &EntityDomains) -> Result<Engine<'a>, EngineError> {
        let init = initial_state(app);
        let mut entities = BTreeMap::new();
        for sort in app.entity_sorts() {
            let ids = given.entity(&sort).ok_or_else(|| EngineError::MissingDomain(sort.clone()))?;
            entities.insert(sort, ids.iter().map(Value::entity).collect());
        }
        let money = match &given.money {
            Some(m) => m.iter().copied().collect::<BTreeSet<_>>(),
            None => {
                let mut found = BTreeSet::new();
                for inst in app.instance_names() {
                    let def = app.concept(inst).expect("linked instance");
                    for c in def.state.iter().filter(|c| !c.is_derived()) {
                        if let Some(v) = init.get(inst, &c.name) {
                            collect_money(v, &c.kind, &mut found);
                        }
                    }
                }
                if found.is_empty() {
                    found.insert(0);
                }
                found
            }
        };
        let nat = given.nat.clone().unwrap_or_else(|| vec![0, 1, 2]);
        let text = given.text.clone().unwrap_or_else(|| vec![String::new()]);
        let domains = Domains {
            entities,
            nat: nat.into_iter().filter(|n| *n >= 0).map(Value::Nat).collect(),
            money: money.into_iter().map(Value::Money).collect(),
            text: text.into_iter().map(Value::Text).collect(),
        };
        Ok(Engine { app, domains, init })
    }

    pub fn init_state(&self) -> AppState {
        self.init.clone()
    }

    fn def(&self, instance: &str) -> Result<&'a ConceptDef, StepError> {
        self.app.concept(instance).ok_or_else(|| StepError::UnknownInstance(instance.to_string()))
    }

    fn action(&self, instance: &str, action: &str) -> Result<(&'a ConceptDef, &'a ActionDef), StepError> {
        let def = self.def(instance)?;
        let act = def.action(action).ok_or_else(|| StepError::UnknownAction(format!("{}.{action}", def.name)))?;
        Ok((def, act))
    }

    /// Whether the action's precondition holds for these arguments (no initiator or sync checks).
    pub fn precondition_holds(&self, state: &AppState, instance: &str, action: &str, args: &[Value]) -> bool {
        let Ok((def, act)) = self.action(instance, action) else { return false };
        let Some(st) = state.instance(instance) else { return false };
        let env = bind_params(act, args);
        eval_bool(&ConceptView::new(def, st), &env, &act.precondition).unwrap_or(false)
    }

    /// Actions the role may start from `state`, each with the first argument tuple that satisfies
    /// its precondition.
    pub fn enabled(&self, state: &AppState, role: Role) -> Vec<(String, String, Vec<Value>)> {
        let mut out = Vec::new();
        for inst in self.app.instance_names() {
            let def = self.app.concept(inst).expect("linked instance");
            for act in def.actions.iter().filter(|a| a.initiator.admits(role)) {
                let witness = self
                    .domains
                    .tuples(&act.param_sorts())
                    .into_iter()
                    .find(|args| self.precondition_holds(state, inst, &act.name, args));
                if let Some(w) = witness {
                    out.push((inst.to_string(), act.name.clone(), w));
                }
            }
        }
        out
    }

    /// Runs `call` and the closure of sync reactions it triggers, all or nothing.
    pub fn step(&self, state: &AppState, call: &ActionCall) -> Result<(AppState, Step), StepError> {
        let (def, act) = self.action(&call.instance, &call.action)?;
        let qualified = format!("{}.{}", def.name, act.name);
        if call.args.len() != act.params.len() {
            return Err(StepError::Arity { action: qualified, expected: act.params.len(), found: call.args.len() });
        }
        if !act.initiator.admits(call.role) {
            return Err(StepError::InitiatorForbidden { action: qualified, role: call.role });
        }
        let mut next = state.clone();
        let mut reactions = Vec::new();
        self.fire(&mut next, &call.instance, &call.action, call.args.clone(), 0, &mut reactions)?;
        let digest = next.digest();
        Ok((next, Step { call: call.clone(), reactions, digest }))
    }

    fn fire(
        &self,
        state: &mut AppState,
        instance: &str,
        action: &str,
        args: Vec<Value>,
        depth: usize,
        reactions: &mut Vec<Invocation>,
    ) -> Result<(), StepError> {
        if depth > MAX_SYNC_DEPTH {
            return Err(StepError::CycleDetected);
        }
        let (def, act) = self.action(instance, action)?;
        let qualified = format!("{}.{}", def.name, act.name);
        if args.len() != act.params.len() {
            return Err(StepError::Arity { action: qualified, expected: act.params.len(), found: args.len() });
        }
        let mut args = args;
        for (i, (a, p)) in args.iter_mut().zip(&act.params).enumerate() {
            if !a.fits(&p.sort) {
                return Err(StepError::ArgSort { action: qualified, index: i, sort: p.sort.clone() });
            }
            *a = a.clone().coerce_to(&p.sort);
        }
        let env = bind_params(act, &args);
        let before = state.clone();
        let st = before.instance(instance).ok_or_else(|| StepError::UnknownInstance(instance.to_string()))?;
        let view = ConceptView::new(def, st);
        match eval_bool(&view, &env, &act.precondition) {
            Ok(true) => {}
            Ok(false) => return Err(StepError::PreconditionFailed { action: qualified, detail: None }),
            Err(e) => return Err(StepError::PreconditionFailed { action: qualified, detail: Some(e.to_string()) }),
        }
        let updated = apply_effects(def, st, act, &env)
            .map_err(|source| StepError::Effect { action: qualified.clone(), source })?;
        state.instances.insert(instance.to_string(), updated);

        for sync in &self.app.model.syncs {
            let t = &sync.trigger;
            if t.instance != instance || t.action != action {
                continue;
            }
            let Some(vars) = match_pattern(&t.pattern, &args) else { continue };
            let view = AppView::new(self.app, &before);
            for r in &sync.reactions {
                let mut vals = Vec::with_capacity(r.args.len());
                for e in &r.args {
                    let v = eval(&view, &mut vars.clone(), e)
                        .map_err(|source| StepError::ReactionArg { sync: sync.name.clone(), source })?;
                    vals.push(v);
                }
                reactions.push(Invocation { instance: r.instance.clone(), action: r.action.clone(), args: vals.clone() });
                self.fire(state, &r.instance, &r.action, vals, depth + 1, reactions)?;
            }
        }
        Ok(())
    }

    /// Every candidate call from `opts`' instances and roles, over the domain.
    fn candidate_calls(&self, opts: &TraceOptions) -> Vec<ActionCall> {
        let mut out = Vec::new();
        for inst in self.app.instance_names() {
            if opts.instances.as_ref().is_some_and(|f| !f.contains(inst)) {
                continue;
            }
            let def = self.app.concept(inst).expect("linked instance");
            for act in &def.actions {
                for role in Role::ALL.into_iter().filter(|r| opts.roles.contains(r) && act.initiator.admits(*r)) {
                    for args in self.domains.tuples(&act.param_sorts()) {
                        out.push(ActionCall::new(inst, &act.name, args, role));
                    }
                }
            }
        }
        out
    }

    /// All traces of length at most `depth` from the initial state, including the empty trace,
    /// in depth-first order.
    pub fn enumerate_traces(&self, depth: usize, opts: &TraceOptions) -> Result<Vec<Trace>, EngineError> {
        let calls = self.candidate_calls(opts);
        let mut out = vec![Vec::new()];
        let mut budget = opts.state_cap;
        let mut prefix = Vec::new();
        self.dfs(&self.init, depth, &calls, &mut prefix, &mut out, &mut budget, opts.state_cap)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        state: &AppState,
        depth: usize,
        calls: &[ActionCall],
        prefix: &mut Trace,
        out: &mut Vec<Trace>,
        budget: &mut usize,
        cap: usize,
    ) -> Result<(), EngineError> {
        if depth == 0 {
            return Ok(());
        }
        for call in calls {
            let Ok((next, step)) = self.step(state, call) else { continue };
            if *budget == 0 {
                return Err(EngineError::BudgetExceeded(cap));
            }
            *budget -= 1;
            prefix.push(step);
            out.push(prefix.clone());
            self.dfs(&next, depth - 1, calls, prefix, out, budget, cap)?;
            prefix.pop();
        }
        Ok(())
    }

    /// Distinct states reachable within `depth` steps, starting state included.
    pub fn reachable_states(&self, depth: usize, opts: &TraceOptions) -> Result<Vec<AppState>, EngineError> {
        let calls = self.candidate_calls(opts);
        let mut seen = BTreeSet::new();
        seen.insert(self.init.clone());
        let mut frontier = vec![self.init.clone()];
        for _ in 0..depth {
            let mut next_frontier = Vec::new();
            for s in &frontier {
                for call in &calls {
                    if let Ok((n, _)) = self.step(s, call) {
                        if !seen.contains(&n) {
                            if seen.len() >= opts.state_cap {
                                return Err(EngineError::BudgetExceeded(opts.state_cap));
                            }
                            seen.insert(n.clone());
                            next_frontier.push(n);
                        }
                    }
                }
            }
            frontier = next_frontier;
        }
        Ok(seen.into_iter().collect())
    }

    /// Replays a sequence of calls from the initial state, stopping at the first failure.
    pub fn replay(&self, calls: &[ActionCall]) -> Result<(AppState, Trace), (usize, StepError)> {
        let mut state = self.init_state();
        let mut trace = Vec::new();
        for (i, c) in calls.iter().enumerate() {
            let (next, step) = self.step(&state, c).map_err(|e| (i, e))?;
            state = next;
            trace.push(step);
        }
        Ok((state, trace))
    }
}

/// Which calls trace enumeration may start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    pub roles: Vec<Role>,
    /// Restricts triggering calls to these instances; reactions still fire anywhere.
    pub instances: Option<BTreeSet<String>>,
    pub state_cap: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { roles: Role::ALL.to_vec(), instances: None, state_cap: DEFAULT_STATE_CAP }
    }
}

impl TraceOptions {
    pub fn only(instance: &str) -> Self {
        TraceOptions { instances: Some([instance.to_string()].into()), ..Self::default() }
    }
}

/// Initial state: declared component initials, overridden by the app's `init` blocks.
pub fn initial_state(app: &App) -> AppState {
    let mut out = AppState::default();
    for decl in &app.model.instances {
        let def = app.concept(&decl.name).expect("linked instance");
        let mut st = def.initial_state();
        for (comp, lit) in &decl.init {
            if let Some(c) = def.component(comp) {
                if let Some(v) = lit.to_value(&c.kind) {
                    st.insert(comp.clone(), v);
                }
            }
        }
        out.instances.insert(decl.name.clone(), st);
    }
    out
}

/// Checks domains and builds the initial state.
pub fn init_state(app: &App, domain: &EntityDomains) -> Result<AppState, EngineError> {
    Ok(Engine::new(app, domain)?.init_state())
}

fn bind_params(act: &ActionDef, args: &[Value]) -> Bindings {
    act.params.iter().zip(args).map(|(p, v)| (p.name.clone(), v.clone().coerce_to(&p.sort))).collect()
}

fn match_pattern(pattern: &[ArgPattern], args: &[Value]) -> Option<Bindings> {
    if pattern.len() != args.len() {
        return None;
    }
    let mut env = Bindings::new();
    for (p, a) in pattern.iter().zip(args) {
        match p {
            ArgPattern::Any => {}
            ArgPattern::Var(v) => match env.get(v) {
                Some(prev) if !prev.loose_eq(a) => return None,
                Some(_) => {}
                None => env.push(v.clone(), a.clone()),
            },
            ArgPattern::Lit(l) => {
                if !l.to_scalar().is_some_and(|v| v.loose_eq(a)) {
                    return None;
                }
            }
        }
    }
    Some(env)
}

/// Evaluates every effect against the pre-state, then applies them in order.
fn apply_effects(
    def: &ConceptDef,
    st: &ConceptState,
    act: &ActionDef,
    env: &Bindings,
) -> Result<ConceptState, EvalError> {
    enum Op {
        Insert(String, Value),
        Remove(String, Value),
        Put(String, Value, Value),
        Drop(String, Value),
        Assign(String, Value),
        Clear(String),
    }
    let view = ConceptView::new(def, st);
    let ev = |e| eval(&view, &mut env.clone(), e);
    let mut ops = Vec::with_capacity(act.effects.len());
    for s in &act.effects {
        ops.push(match s {
            UpdateStmt::Insert { set, elem } => Op::Insert(set.clone(), ev(elem)?),
            UpdateStmt::Remove { set, elem } => Op::Remove(set.clone(), ev(elem)?),
            UpdateStmt::Put { map, key, value } => Op::Put(map.clone(), ev(key)?, ev(value)?),
            UpdateStmt::Drop { map, key } => Op::Drop(map.clone(), ev(key)?),
            UpdateStmt::Assign { target, value } => Op::Assign(target.clone(), ev(value)?),
            UpdateStmt::Clear { target } => Op::Clear(target.clone()),
        });
    }
    let mut out = st.clone();
    for op in ops {
        let name = match &op {
            Op::Insert(n, _) | Op::Remove(n, _) | Op::Put(n, _, _) | Op::Drop(n, _) | Op::Assign(n, _) | Op::Clear(n) => {
                n.clone()
            }
        };
        let comp = def
            .component(&name)
            .filter(|c| !c.is_derived())
            .ok_or_else(|| EvalError::UnknownComponent(format!("{}.{name}", def.name)))?;
        let slot = out.get_mut(&name).ok_or_else(|| EvalError::UnknownComponent(format!("{}.{name}", def.name)))?;
        let mismatch = || EvalError::TypeMismatch(format!("cannot update {}.{name} this way", def.name));
        match (op, slot, &comp.kind) {
            (Op::Insert(_, v), Value::Set(s), _) => {
                s.insert(v);
            }
            (Op::Remove(_, v), Value::Set(s), _) => {
                s.remove(&v);
            }
            (Op::Put(_, k, v), Value::Map(m), ComponentKind::Map(ks, vs)) => {
                if !v.fits(vs) {
                    return Err(EvalError::TypeMismatch(format!("{v} is not a {vs}")));
                }
                m.insert(k.coerce_to(ks), v.coerce_to(vs));
            }
            (Op::Drop(_, k), Value::Map(m), ComponentKind::Map(ks, _)) => {
                m.remove(&k.coerce_to(ks));
            }
            (Op::Assign(_, v), slot, ComponentKind::Scalar(s)) => {
                if !v.fits(s) {
                    return Err(EvalError::TypeMismatch(format!("{v} is not a {s}")));
                }
                *slot = v.coerce_to(s);
            }
            (Op::Clear(_), slot, kind) => *slot = Value::default_for(kind),
            _ => return Err(mismatch()),
        }
    }
    Ok(out)
}
