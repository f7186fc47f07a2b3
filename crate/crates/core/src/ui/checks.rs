use std::collections::{BTreeMap, BTreeSet};

use super::{CheckConfig, ControlScope, ConventionRegistry, MappingStandard, UiBinding, UiElement, UiModel, UiRef};
use crate::engine::{AppState, AppView, Engine};
use crate::model::{
    eval, eval_bool, normalize, ArgPattern, Bindings, Category, ConceptDef, Deviation, Dyad, Initiator, Principle, Role, Sort,
    Value,
};

/// A concept the UI calls to mind through registered idioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evocation {
    pub concept: String,
    /// Matched tokens and labels, sorted.
    pub evidence: Vec<String>,
}

/// Concepts evoked by at least `k` distinct registered idioms on visible elements.
pub fn identify_evoked(ui: &UiModel, registry: &ConventionRegistry, k: usize) -> Vec<Evocation> {
    let mut hits: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for el in ui.visible() {
        if let Some(tok) = &el.convention {
            if let Some(c) = registry.token(tok).and_then(|m| m.concept()) {
                hits.entry(c.to_string()).or_default().insert(format!("token {tok}"));
            }
        }
        if let Some(c) = registry.label(&el.label).and_then(|m| m.concept()) {
            hits.entry(c.to_string()).or_default().insert(format!("label {:?}", el.label.trim().to_lowercase()));
        }
    }
    hits.into_iter()
        .filter(|(_, ev)| ev.len() >= k.max(1))
        .map(|(concept, ev)| Evocation { concept, evidence: ev.into_iter().collect() })
        .collect()
}

/// The instance most often targeted by visible elements that evoke `concept`.
pub fn evoking_instance(ui: &UiModel, registry: &ConventionRegistry, concept: &str) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for el in ui.visible() {
        let by_token = el.convention.as_deref().and_then(|t| registry.token(t)).and_then(|m| m.concept());
        let by_label = registry.label(&el.label).and_then(|m| m.concept());
        if by_token == Some(concept) || by_label == Some(concept) {
            if let Some((inst, _, _)) = target(el) {
                *counts.entry(inst).or_default() += 1;
            }
        }
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0))).map(|(i, _)| i.to_string())
}

/// `(instance, member, is_action)` the element is bound to.
pub fn target(el: &UiElement) -> Option<(&str, &str, bool)> {
    match &el.binding {
        UiBinding::Triggers { call, .. } => Some((&call.instance, &call.action, true)),
        UiBinding::Displays(r) | UiBinding::Claims { claimed: r, .. } => Some((&r.instance, &r.component, false)),
        UiBinding::Static => None,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservedAction {
    pub initiators: BTreeSet<Role>,
    pub elements: Vec<String>,
    pub min_steps: u32,
}

/// What a user can learn about one concept from the UI.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservedConcept {
    pub concept: String,
    pub actions: BTreeMap<String, ObservedAction>,
    pub states: BTreeMap<String, Vec<String>>,
}

/// An apparent coupling: a preselected control on the same screen as another control.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ObservedSync {
    pub preselected: (String, String),
    pub other: (String, String),
    pub screen: String,
}

/// Everything the mapping checks need about one candidate design.
pub struct MappingContext<'a> {
    pub engine: &'a Engine<'a>,
    pub ui: &'a UiModel,
    pub registry: &'a ConventionRegistry,
    pub cfg: &'a CheckConfig,
    /// Candidate instance standing for the standard concept.
    pub bound: Option<&'a str>,
    pub standard: Option<&'a ConceptDef>,
    pub independent: &'a [String],
    pub standards: &'a [MappingStandard],
    /// Candidate states against which value-dependent checks run.
    pub samples: Vec<AppState>,
}

impl MappingContext<'_> {
    /// Concept name an instance presents as in reports.
    pub fn present(&self, instance: &str) -> String {
        if self.bound == Some(instance) {
            if let Some(std) = self.standard {
                return std.name.clone();
            }
        }
        self.engine.app.presented_name(instance).unwrap_or(instance).to_string()
    }

    fn subject(&self, instance: &str, member: &str) -> String {
        format!("{}.{member}", self.present(instance))
    }

    fn read_ref(&self, r: &UiRef, st: &AppState) -> Option<Value> {
        let v = AppView::new(self.engine.app, st).read(&r.instance, &r.component).ok()?;
        match &r.key {
            None => Some(v),
            Some(k) => {
                let k = k.to_scalar()?;
                match v {
                    Value::Map(m) => m.into_iter().find(|(kk, _)| kk.loose_eq(&k)).map(|(_, v)| v),
                    _ => None,
                }
            }
        }
    }

    /// The value an element actually renders in `st`.
    pub fn shown_value(&self, el: &UiElement, st: &AppState) -> Option<Value> {
        match &el.binding {
            UiBinding::Displays(r) => self.read_ref(r, st),
            UiBinding::Claims { shown, .. } => {
                eval(&AppView::new(self.engine.app, st), &mut Bindings::new(), shown).ok()
            }
            _ => None,
        }
    }

    fn triggers<'u>(&'u self, instance: &'u str, action: &'u str) -> impl Iterator<Item = &'u UiElement> + 'u {
        self.ui.visible().filter(move |e| e.call().is_some_and(|c| c.instance == instance && c.action == action))
    }

    fn qualifies(&self, el: &UiElement) -> bool {
        el.steps <= self.cfg.max_steps && el.prominence >= self.cfg.min_prominence
    }

    /// Whether the element's label promises something other than what it triggers.
    fn misleading_label(&self, el: &UiElement) -> bool {
        let Some(call) = el.call() else { return false };
        match self.registry.label(&el.label) {
            Some(m) => !m.admits(&self.present(&call.instance), &call.action, true),
            None => false,
        }
    }

    /// Standard actions the user is meant to start, that the bound candidate also has.
    fn user_actions(&self) -> Vec<String> {
        let (Some(std), Some(bound)) = (self.standard, self.bound) else { return vec![] };
        let Some(cand) = self.engine.app.concept(bound) else { return vec![] };
        std.actions
            .iter()
            .filter(|a| a.initiator == Initiator::User && cand.action(&a.name).is_some())
            .map(|a| a.name.clone())
            .collect()
    }

    fn dev(&self, p: Principle, subject: String, dyad: Dyad, evidence: String) -> Deviation {
        Deviation::new(Category::MappingViolation(p), subject, dyad, evidence)
    }
}

/// Observed concepts keyed by presented concept name, plus apparent couplings.
pub fn derive_observed(ctx: &MappingContext<'_>) -> (BTreeMap<String, ObservedConcept>, Vec<ObservedSync>) {
    let mut out: BTreeMap<String, ObservedConcept> = BTreeMap::new();
    for el in ctx.ui.visible() {
        let Some((inst, member, is_action)) = target(el) else { continue };
        let name = ctx.present(inst);
        let oc = out.entry(name.clone()).or_insert_with(|| ObservedConcept { concept: name, ..Default::default() });
        if is_action {
            if !ctx.qualifies(el) {
                continue;
            }
            let entry = oc
                .actions
                .entry(member.to_string())
                .or_insert_with(|| ObservedAction { min_steps: el.steps, ..Default::default() });
            entry.initiators.insert(if ctx.misleading_label(el) { Role::Provider } else { Role::User });
            entry.elements.push(el.id.clone());
            entry.min_steps = entry.min_steps.min(el.steps);
        } else {
            oc.states.entry(member.to_string()).or_default().push(el.id.clone());
        }
    }
    out.retain(|_, oc| !oc.actions.is_empty() || !oc.states.is_empty());
    let mut syncs = Vec::new();
    for screen in &ctx.ui.screens {
        let visible: Vec<&UiElement> = screen.elements.iter().filter(|e| e.visible).collect();
        for pre in visible.iter().filter(|e| e.default_on()) {
            let pc = pre.call().expect("default-on elements trigger");
            for other in &visible {
                let Some(oc) = other.call() else { continue };
                if other.id == pre.id || (oc.instance == pc.instance && oc.action == pc.action) {
                    continue;
                }
                syncs.push(ObservedSync {
                    preselected: (pc.instance.clone(), pc.action.clone()),
                    other: (oc.instance.clone(), oc.action.clone()),
                    screen: screen.name.clone(),
                });
            }
        }
    }
    syncs.sort();
    syncs.dedup();
    (out, syncs)
}

/// Gaps between the observed and the standard concept: unreachable actions, wrong apparent
/// initiators, and couplings of actions the standard keeps independent.
pub fn observed_deviations(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let (Some(std), Some(bound)) = (ctx.standard, ctx.bound) else { return vec![] };
    let mut out = Vec::new();
    for a in ctx.user_actions() {
        let elems: Vec<&UiElement> = ctx.triggers(bound, &a).collect();
        if !elems.is_empty() && !elems.iter().any(|e| ctx.qualifies(e)) {
            let ev: Vec<String> =
                elems.iter().map(|e| format!("{} (steps {}, prominence {})", e.id, e.steps, e.prominence)).collect();
            out.push(Deviation::new(
                Category::MissingAction,
                format!("{}.{a}", std.name),
                Dyad::ObservedVsExpected,
                format!("not observable: {}", ev.join(", ")),
            ));
        }
    }
    let (observed, syncs) = derive_observed(ctx);
    if let Some(oc) = observed.get(&std.name) {
        for (name, oa) in &oc.actions {
            let Some(sa) = std.action(name) else { continue };
            let extra: Vec<&str> =
                oa.initiators.iter().filter(|r| !sa.initiator.admits(**r)).map(|r| r.keyword()).collect();
            if !extra.is_empty() {
                out.push(Deviation::new(
                    Category::InitiatorMismatch,
                    format!("{}.{name}", std.name),
                    Dyad::ObservedVsExpected,
                    format!("appears initiated by {} via {}", extra.join(", "), oa.elements.join(", ")),
                ));
            }
        }
    }
    for s in &syncs {
        let pairs = [(&s.preselected, &s.other), (&s.other, &s.preselected)];
        for (mine, theirs) in pairs {
            if mine.0 == bound && theirs.0 != bound && ctx.independent.contains(&mine.1) {
                out.push(Deviation::new(
                    Category::UnexpectedSync,
                    format!("{}.{}~{}", std.name, mine.1, ctx.subject(&theirs.0, &theirs.1)),
                    Dyad::ObservedVsExpected,
                    format!("preselected {}.{} on screen {}", s.preselected.0, s.preselected.1, s.screen),
                ));
            }
        }
    }
    out
}

/// Standard user actions without any visible control, and elements bound to nothing real.
pub fn check_correspondence(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let mut out = Vec::new();
    if let Some(bound) = ctx.bound {
        for a in ctx.user_actions() {
            if ctx.triggers(bound, &a).next().is_none() {
                out.push(ctx.dev(
                    Principle::Correspondence,
                    ctx.subject(bound, &a),
                    Dyad::ObservedVsExpected,
                    "no visible element triggers it".into(),
                ));
            }
        }
    }
    let app = ctx.engine.app;
    for el in ctx.ui.elements() {
        let Some((inst, member, is_action)) = target(el) else { continue };
        let ok = match app.concept(inst) {
            None => false,
            Some(def) if is_action => {
                def.action(member).is_some_and(|a| el.call().is_some_and(|c| c.args.len() == a.params.len()))
            }
            Some(def) => def.component(member).is_some(),
        };
        if !ok {
            let subject = match app.concept(inst) {
                Some(_) => ctx.subject(inst, member),
                None => format!("{inst}.{member}"),
            };
            out.push(ctx.dev(
                Principle::Correspondence,
                subject,
                Dyad::ObservedVsExpected,
                format!("element {} is bound to something the app lacks", el.id),
            ));
        }
    }
    out
}

/// Claimed values that differ from what is shown, and labels that misname the triggered action.
pub fn check_faithfulness(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let mut out = Vec::new();
    for el in ctx.ui.visible() {
        if let UiBinding::Claims { claimed, .. } = &el.binding {
            for st in &ctx.samples {
                let (Some(c), Some(s)) = (ctx.read_ref(claimed, st), ctx.shown_value(el, st)) else { continue };
                if !c.loose_eq(&s) {
                    out.push(ctx.dev(
                        Principle::Faithfulness,
                        ctx.subject(&claimed.instance, &claimed.component),
                        Dyad::ImplementedVsExpected,
                        format!("element {} shows {s} where the state holds {c}", el.id),
                    ));
                    break;
                }
            }
        }
        if ctx.misleading_label(el) {
            let call = el.call().expect("misleading labels are on triggers");
            let meaning = ctx.registry.label(&el.label).expect("registered label");
            out.push(ctx.dev(
                Principle::Faithfulness,
                ctx.subject(&call.instance, &call.action),
                Dyad::ImplementedVsExpected,
                format!("element {} is labelled {:?} ({meaning})", el.id, el.label),
            ));
        }
    }
    out
}

fn style_conflicts<'e>(ctx: &MappingContext<'_>, elems: impl Iterator<Item = &'e UiElement>) -> Vec<Deviation> {
    let mut groups: BTreeMap<(String, String, bool), BTreeSet<Option<String>>> = BTreeMap::new();
    for el in elems {
        if let Some((inst, member, is_action)) = target(el) {
            groups.entry((inst.to_string(), member.to_string(), is_action)).or_default().insert(el.style.clone());
        }
    }
    groups
        .into_iter()
        .filter(|(_, styles)| styles.len() > 1)
        .map(|((inst, member, _), styles)| {
            let names: Vec<String> = styles.into_iter().map(|s| s.unwrap_or_else(|| "default".into())).collect();
            ctx.dev(
                Principle::Consistency,
                ctx.subject(&inst, &member),
                Dyad::ObservedVsExpected,
                format!("presented with styles {}", names.join(", ")),
            )
        })
        .collect()
}

fn value_conflicts(ctx: &MappingContext<'_>, elems: &[&UiElement], across_screens_only: bool) -> Option<String> {
    for st in &ctx.samples {
        let shown: Vec<(&UiElement, Value)> =
            elems.iter().filter_map(|e| ctx.shown_value(e, st).map(|v| (*e, v))).collect();
        for (i, (a, va)) in shown.iter().enumerate() {
            for (b, vb) in &shown[i + 1..] {
                if across_screens_only && a.screen == b.screen {
                    continue;
                }
                if !va.loose_eq(vb) {
                    return Some(format!("{} shows {va} but {} shows {vb}", a.id, b.id));
                }
            }
        }
    }
    None
}

/// Same target styled differently, or the same state showing different values on different screens.
pub fn check_consistency(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let mut out = style_conflicts(ctx, ctx.ui.visible());
    let mut by_ref: BTreeMap<(String, String, String), Vec<&UiElement>> = BTreeMap::new();
    for el in ctx.ui.visible() {
        if let Some(r) = el.shown_ref() {
            let key = r.key.as_ref().map(|k| format!("{k:?}")).unwrap_or_default();
            by_ref.entry((r.instance.clone(), r.component.clone(), key)).or_default().push(el);
        }
    }
    for ((inst, comp, _), elems) in by_ref {
        if let Some(ev) = value_conflicts(ctx, &elems, true) {
            out.push(ctx.dev(Principle::Consistency, ctx.subject(&inst, &comp), Dyad::ObservedVsExpected, ev));
        }
    }
    out
}

fn gap(a: &UiElement, b: &UiElement) -> u32 {
    a.prominence.0.abs_diff(b.prominence.0)
}

/// Paired controls of unequal prominence, and preselected controls.
pub fn check_symmetry(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let mut out = Vec::new();
    for el in ctx.ui.visible() {
        let subject_of = |e: &UiElement| target(e).map(|(i, m, _)| ctx.subject(i, m));
        if let Some(other) = el.paired.as_deref().and_then(|p| ctx.ui.element(p)).filter(|o| o.visible) {
            if el.id < other.id && gap(el, other) > ctx.cfg.epsilon.0 {
                let lower = if el.prominence < other.prominence { el } else { other };
                if let Some(s) = subject_of(lower) {
                    out.push(ctx.dev(
                        Principle::Symmetry,
                        s,
                        Dyad::ObservedVsExpected,
                        format!("{} prominence {} vs {} prominence {}", el.id, el.prominence, other.id, other.prominence),
                    ));
                }
            }
        }
        if el.default_on() {
            if let Some(s) = subject_of(el) {
                out.push(ctx.dev(
                    Principle::Symmetry,
                    s,
                    Dyad::ObservedVsExpected,
                    format!("{} is preselected", el.id),
                ));
            }
        }
    }
    out
}

/// Registered tokens used for something other than their registered meaning.
pub fn check_conventions(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let mut out = Vec::new();
    for el in ctx.ui.visible() {
        let Some(tok) = &el.convention else { continue };
        let Some(meaning) = ctx.registry.token(tok) else { continue };
        let Some((inst, member, is_action)) = target(el) else { continue };
        if !meaning.admits(&ctx.present(inst), member, is_action) {
            out.push(ctx.dev(
                Principle::Conventions,
                ctx.subject(inst, member),
                Dyad::ObservedVsExpected,
                format!("element {} uses {tok} ({meaning})", el.id),
            ));
        }
    }
    out
}

fn min_steps(ctx: &MappingContext<'_>, instance: &str, action: &str) -> Option<u32> {
    ctx.triggers(instance, action).map(|e| e.steps).min()
}

/// Actions that take disproportionately more steps to reach than their counterpart.
pub fn check_reach_parity(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let Some(bound) = ctx.bound else { return vec![] };
    let mut out = Vec::new();
    for rule in ctx.standards {
        let MappingStandard::ReachParity { first, second, max_ratio } = rule else { continue };
        let (Some(a), Some(b)) = (min_steps(ctx, bound, first), min_steps(ctx, bound, second)) else { continue };
        let ratio = max_ratio.unwrap_or(ctx.cfg.max_ratio);
        if u64::from(b) * 1000 > ratio.times(a.max(1)) {
            out.push(ctx.dev(
                Principle::Reach,
                ctx.subject(bound, second),
                Dyad::ObservedVsExpected,
                format!("{second} takes {b} steps, {first} takes {a}, allowed ratio {ratio}"),
            ));
        }
    }
    out
}

/// Concept-specific mapping rules from the catalog entry.
pub fn check_standards(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let (Some(bound), Some(std)) = (ctx.bound, ctx.standard) else { return vec![] };
    let mut out = Vec::new();
    let presents = |e: &UiElement, comp: &str| e.shown_ref().is_some_and(|r| r.instance == bound && r.component == comp);
    for rule in ctx.standards {
        match rule {
            MappingStandard::RequireDisplay { state } => {
                if !ctx.ui.visible().any(|e| presents(e, state)) {
                    out.push(ctx.dev(
                        Principle::Standard,
                        ctx.subject(bound, state),
                        Dyad::ObservedVsExpected,
                        "required display is missing".into(),
                    ));
                }
            }
            MappingStandard::RequireControl { action, scope } => {
                let controls: Vec<&UiElement> = ctx.triggers(bound, action).collect();
                let is_user = std.action(action).is_some_and(|a| a.initiator == Initiator::User);
                if controls.is_empty() {
                    if !is_user {
                        out.push(ctx.dev(
                            Principle::Standard,
                            ctx.subject(bound, action),
                            Dyad::ObservedVsExpected,
                            "required control is missing".into(),
                        ));
                    }
                    continue;
                }
                if *scope == ControlScope::PerItem {
                    out.extend(missing_item_controls(ctx, bound, action, &controls));
                }
            }
            MappingStandard::GuardedControl { action, guard } => {
                if let Some(d) = unguarded_control(ctx, bound, std, action, guard) {
                    out.push(d);
                }
            }
            MappingStandard::LabelReservation { label, state } => {
                let wanted = label.trim().to_lowercase();
                for el in ctx.ui.visible() {
                    let honest = matches!(&el.binding, UiBinding::Displays(r) if r.instance == bound && r.component == *state);
                    if el.label.trim().to_lowercase() == wanted && !honest {
                        out.push(ctx.dev(
                            Principle::Faithfulness,
                            ctx.subject(bound, state),
                            Dyad::ImplementedVsExpected,
                            format!("element {} uses the reserved label {label:?}", el.id),
                        ));
                    }
                }
            }
            MappingStandard::EqualProminence { first, second } => {
                let top = |a: &str| ctx.triggers(bound, a).map(|e| e.prominence).max();
                if let (Some(pa), Some(pb)) = (top(first), top(second)) {
                    if pa.0.abs_diff(pb.0) > ctx.cfg.epsilon.0 {
                        let lower = if pa < pb { first } else { second };
                        out.push(ctx.dev(
                            Principle::Symmetry,
                            ctx.subject(bound, lower),
                            Dyad::ObservedVsExpected,
                            format!("{first} prominence {pa} vs {second} prominence {pb}"),
                        ));
                    }
                }
            }
            MappingStandard::ConsistencyGroup { subject } => {
                let members: Vec<&UiElement> = ctx
                    .ui
                    .visible()
                    .filter(|e| presents(e, subject) || e.call().is_some_and(|c| c.instance == bound && c.action == *subject))
                    .collect();
                out.extend(style_conflicts(ctx, members.iter().copied()));
                let mut by_key: BTreeMap<String, Vec<&UiElement>> = BTreeMap::new();
                for e in members.iter().filter(|e| e.shown_ref().is_some()) {
                    let k = e.shown_ref().and_then(|r| r.key.as_ref()).map(|k| format!("{k:?}")).unwrap_or_default();
                    by_key.entry(k).or_default().push(e);
                }
                for elems in by_key.values() {
                    if let Some(ev) = value_conflicts(ctx, elems, false) {
                        out.push(ctx.dev(Principle::Consistency, ctx.subject(bound, subject), Dyad::ObservedVsExpected, ev));
                    }
                }
            }
            MappingStandard::ReachParity { .. } => {}
        }
    }
    out
}

fn missing_item_controls(ctx: &MappingContext<'_>, bound: &str, action: &str, controls: &[&UiElement]) -> Vec<Deviation> {
    let Some(def) = ctx.engine.app.concept(bound).and_then(|d| d.action(action)) else { return vec![] };
    let Some((idx, sort)) = def.params.iter().enumerate().find(|(_, p)| matches!(p.sort, Sort::Entity(_))).map(|(i, p)| (i, &p.sort))
    else {
        return vec![];
    };
    let mut out = Vec::new();
    for item in ctx.engine.domains.values(sort) {
        let covered = controls.iter().any(|c| match c.call().and_then(|c| c.args.get(idx)) {
            Some(ArgPattern::Any) | Some(ArgPattern::Var(_)) => true,
            Some(ArgPattern::Lit(l)) => l.to_scalar().is_some_and(|v| v.loose_eq(item)),
            None => false,
        });
        if !covered {
            out.push(ctx.dev(
                Principle::Standard,
                ctx.subject(bound, action),
                Dyad::ObservedVsExpected,
                format!("no control for {item}"),
            ));
        }
    }
    out
}

/// A control that is enabled, and whose action could run, while the standard guard is false.
fn unguarded_control(
    ctx: &MappingContext<'_>,
    bound: &str,
    std: &ConceptDef,
    action: &str,
    guard: &crate::model::Expr,
) -> Option<Deviation> {
    let app = ctx.engine.app;
    let def = app.concept(bound)?.action(action)?;
    let mut rename = BTreeMap::new();
    for inst in app.instance_names() {
        rename.entry(ctx.present(inst)).or_insert_with(|| inst.to_string());
    }
    rename.insert(std.name.clone(), bound.to_string());
    let guard = guard.rename_instances(&rename);
    for el in ctx.triggers(bound, action) {
        let UiBinding::Triggers { call, enabled_when, .. } = &el.binding else { continue };
        let sorts: Vec<&Sort> = def.params.iter().map(|p| &p.sort).collect();
        let tuples = ctx.engine.domains.tuples(&sorts);
        for st in &ctx.samples {
            let view = AppView::new(app, st);
            for args in &tuples {
                let fits = call.args.iter().zip(args).all(|(p, v)| match p {
                    ArgPattern::Lit(l) => l.to_scalar().is_some_and(|x| x.loose_eq(v)),
                    _ => true,
                });
                if !fits || !ctx.engine.precondition_holds(st, bound, action, args) {
                    continue;
                }
                let env: Bindings = def.params.iter().zip(args).map(|(p, v)| (p.name.clone(), v.clone())).collect();
                let enabled = match enabled_when {
                    Some(g) => eval_bool(&view, &env, g).unwrap_or(false),
                    None => true,
                };
                if enabled && !eval_bool(&view, &env, &guard).unwrap_or(false) {
                    let shown: Vec<String> = args.iter().map(Value::to_string).collect();
                    return Some(ctx.dev(
                        Principle::Standard,
                        ctx.subject(bound, action),
                        Dyad::ObservedVsExpected,
                        format!("element {} allows {action}({}) outside the guard", el.id, shown.join(", ")),
                    ));
                }
            }
        }
    }
    None
}

/// Every UI-side check, normalized.
pub fn check_all(ctx: &MappingContext<'_>) -> Vec<Deviation> {
    let mut out = observed_deviations(ctx);
    out.extend(check_correspondence(ctx));
    out.extend(check_faithfulness(ctx));
    out.extend(check_consistency(ctx));
    out.extend(check_symmetry(ctx));
    out.extend(check_conventions(ctx));
    out.extend(check_reach_parity(ctx));
    out.extend(check_standards(ctx));
    normalize(&mut out);
    out
}
