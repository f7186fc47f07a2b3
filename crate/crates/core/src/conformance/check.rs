use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::BenefitAnnotation;
use crate::catalog::CatalogEntry;
use crate::engine::{dump_trace, ActionCall, AppState, AppView, EngineError, Engine, EntityDomains, Step, TraceOptions};
use crate::model::{
    eval_bool, normalize, App, AppModel, Bindings, Category, ConceptDef, ConceptView, DarkFinding, Deviation, Dyad,
    InstanceDecl, LinkError, Reaction, Role, Sort, SyncRule, SyncTrigger, Value,
};
use crate::ui::{check_all, evoking_instance, identify_evoked, CheckConfig, ConventionRegistry, MappingContext, UiModel};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConformanceError {
    #[error("no instance of the candidate corresponds to {0}")]
    UnboundConcept(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot build the standard projection: {0}")]
    Link(#[from] LinkError),
}

/// How the candidate instance standing for the standard concept was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BindingSource {
    /// By concept name or an `implements` clause.
    Declared,
    /// Through conventional UI idioms; carries the matched idioms.
    Evoked(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub instance: String,
    pub source: BindingSource,
}

/// Finds the candidate instance for the entry's concept: declared first, then evoked by the UI.
pub fn bind(
    entry: &CatalogEntry,
    candidate: &App,
    ui: Option<&UiModel>,
    registry: &ConventionRegistry,
    cfg: &CheckConfig,
) -> Option<Binding> {
    let std = entry.concept_name();
    for decl in &candidate.model.instances {
        if decl.implements.as_deref() == Some(std) || (decl.implements.is_none() && decl.concept == std) {
            return Some(Binding { instance: decl.name.clone(), source: BindingSource::Declared });
        }
    }
    let ui = ui?;
    let evoked = identify_evoked(ui, registry, cfg.evoke_k).into_iter().find(|e| e.concept == std)?;
    let instance = evoking_instance(ui, registry, std)?;
    candidate.concept(&instance)?;
    Some(Binding { instance, source: BindingSource::Evoked(evoked.evidence) })
}

fn instance_presenting<'a>(app: &'a App, concept: &str, bound: &'a str, std: &str) -> Option<&'a str> {
    if concept == std {
        return Some(bound);
    }
    app.model
        .instances
        .iter()
        .find(|i| i.name != bound && i.implements.as_deref().unwrap_or(&i.concept) == concept)
        .map(|i| i.name.as_str())
}

/// Required sync templates whose concepts all have instances in `app`, rewritten to instance names.
fn instantiate_templates(entry: &CatalogEntry, app: &App, bound: &str) -> Vec<SyncRule> {
    let std = entry.concept_name();
    let mut out = Vec::new();
    'rules: for t in &entry.required_syncs {
        let mut concepts = vec![t.trigger.instance.as_str()];
        concepts.extend(t.reactions.iter().map(|r| r.instance.as_str()));
        let mut rename = BTreeMap::new();
        for c in concepts {
            match instance_presenting(app, c, bound, std) {
                Some(i) => {
                    rename.insert(c.to_string(), i.to_string());
                }
                None => continue 'rules,
            }
        }
        out.push(SyncRule {
            name: t.name.clone(),
            trigger: SyncTrigger {
                instance: rename[&t.trigger.instance].clone(),
                action: t.trigger.action.clone(),
                pattern: t.trigger.pattern.clone(),
            },
            reactions: t
                .reactions
                .iter()
                .map(|r| Reaction {
                    instance: rename[&r.instance].clone(),
                    action: r.action.clone(),
                    args: r.args.iter().map(|a| a.rename_instances(&rename)).collect(),
                })
                .collect(),
        });
    }
    out
}

/// `(instance, action)`.
type Call = (String, String);
type Edge = (Call, Call);

fn edges(syncs: &[SyncRule]) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for s in syncs {
        for r in &s.reactions {
            out.insert((
                (s.trigger.instance.clone(), s.trigger.action.clone()),
                (r.instance.clone(), r.action.clone()),
            ));
        }
    }
    out
}

/// Both sides of a coupling, standard side first.
fn oriented<'e>(e: &'e Edge, bound: &str) -> Option<(&'e Call, &'e Call)> {
    if e.0 .0 == bound {
        Some((&e.0, &e.1))
    } else if e.1 .0 == bound {
        Some((&e.1, &e.0))
    } else {
        None
    }
}

fn same_signature(a: &crate::model::ActionDef, b: &crate::model::ActionDef) -> bool {
    a.params.len() == b.params.len() && a.params.iter().zip(&b.params).all(|(x, y)| x.sort == y.sort)
}

/// Explicit domains for a candidate, with money amounts fixed so the standard projection and the
/// candidate enumerate the same arguments.
fn pinned_domains(candidate: &App, domains: &EntityDomains) -> Result<EntityDomains, ConformanceError> {
    let eng = Engine::new(candidate, domains)?;
    let mut out = domains.clone();
    out.money = Some(eng.domains.values(&Sort::Money).iter().filter_map(Value::as_int).collect());
    Ok(out)
}

/// Structural comparison of the bound candidate instance against the entry.
pub fn structural_diff(
    entry: &CatalogEntry,
    candidate: &App,
    bound: &str,
    domains: &EntityDomains,
    cfg: &CheckConfig,
) -> Result<Vec<Deviation>, ConformanceError> {
    let std = entry.concept.as_ref();
    let sname = &std.name;
    let cand = candidate.concept(bound).ok_or_else(|| ConformanceError::UnboundConcept(sname.clone()))?;
    let mut out = Vec::new();
    let engine = Engine::new(candidate, domains)?;
    let opts = TraceOptions { state_cap: cfg.state_cap, ..TraceOptions::default() };
    let mut samples: Option<Vec<AppState>> = None;

    for sa in &std.actions {
        let subject = format!("{sname}.{}", sa.name);
        let Some(ca) = cand.action(&sa.name) else {
            out.push(Deviation::new(Category::MissingAction, subject, Dyad::ImplementedVsExpected, "action absent"));
            continue;
        };
        if !same_signature(sa, ca) {
            out.push(Deviation::new(
                Category::MissingAction,
                subject,
                Dyad::ImplementedVsExpected,
                "action signature differs",
            ));
            continue;
        }
        let extra: Vec<&str> =
            Role::ALL.iter().filter(|r| ca.initiator.admits(**r) && !sa.initiator.admits(**r)).map(|r| r.keyword()).collect();
        if !extra.is_empty() {
            out.push(Deviation::new(
                Category::InitiatorMismatch,
                subject.clone(),
                Dyad::ImplementedVsExpected,
                format!("candidate lets {} initiate it", extra.join(", ")),
            ));
        }
        if sa.precondition != ca.precondition {
            let states = match &samples {
                Some(s) => s,
                None => samples.insert(engine.reachable_states(cfg.sample_depth, &opts)?),
            };
            if let Some(ev) = weaker_precondition(&engine, std, bound, sa, states) {
                out.push(Deviation::new(Category::PreconditionMismatch, subject, Dyad::ImplementedVsExpected, ev));
            }
        }
    }
    for sc in &std.state {
        let ok = cand.component(&sc.name).is_some_and(|cc| cc.kind == sc.kind);
        if !ok {
            out.push(Deviation::new(
                Category::MissingState,
                format!("{sname}.{}", sc.name),
                Dyad::ImplementedVsExpected,
                if cand.component(&sc.name).is_some() { "component kind differs" } else { "component absent" },
            ));
        }
    }
    for ca in cand.actions.iter().filter(|a| std.action(&a.name).is_none()) {
        out.push(Deviation::new(Category::Extension, format!("{sname}.{}", ca.name), Dyad::ImplementedVsExpected, "added action"));
    }
    for cc in cand.state.iter().filter(|c| std.component(&c.name).is_none()) {
        let what = if cc.is_derived() { "added derived state" } else { "added state" };
        out.push(Deviation::new(Category::Extension, format!("{sname}.{}", cc.name), Dyad::ImplementedVsExpected, what));
    }

    let required = edges(&instantiate_templates(entry, candidate, bound));
    let present = edges(&candidate.model.syncs);
    for e in &required {
        let Some((mine, theirs)) = oriented(e, bound) else { continue };
        let has = |inst: &str, act: &str| candidate.concept(inst).is_some_and(|d| d.action(act).is_some());
        if !present.contains(e) && has(&e.0 .0, &e.0 .1) && has(&e.1 .0, &e.1 .1) {
            out.push(Deviation::new(
                Category::MissingSync,
                format!("{sname}.{}~{}.{}", mine.1, present_name(candidate, &theirs.0, bound, sname), theirs.1),
                Dyad::ImplementedVsExpected,
                format!("{}.{} should trigger {}.{}", e.0 .0, e.0 .1, e.1 .0, e.1 .1),
            ));
        }
    }
    for e in present.difference(&required) {
        let Some((mine, theirs)) = oriented(e, bound) else { continue };
        let subject = format!("{sname}.{}~{}.{}", mine.1, present_name(candidate, &theirs.0, bound, sname), theirs.1);
        let evidence = format!("{}.{} triggers {}.{}", e.0 .0, e.0 .1, e.1 .0, e.1 .1);
        if theirs.0 != bound && entry.independent.contains(&mine.1) {
            out.push(Deviation::new(Category::UnexpectedSync, subject, Dyad::ImplementedVsExpected, evidence));
        } else {
            out.push(Deviation::new(Category::Extension, subject, Dyad::ImplementedVsExpected, evidence));
        }
    }
    Ok(out)
}

fn present_name(app: &App, instance: &str, bound: &str, std: &str) -> String {
    if instance == bound {
        std.to_string()
    } else {
        app.presented_name(instance).unwrap_or(instance).to_string()
    }
}

/// First state and arguments where the standard precondition holds but the candidate's does not.
fn weaker_precondition(
    engine: &Engine<'_>,
    std: &ConceptDef,
    bound: &str,
    sa: &crate::model::ActionDef,
    states: &[AppState],
) -> Option<String> {
    let tuples = engine.domains.tuples(&sa.param_sorts());
    for st in states {
        let local = st.instance(bound)?;
        let view = ConceptView::new(std, local);
        for args in &tuples {
            let env: Bindings = sa.params.iter().zip(args).map(|(p, v)| (p.name.clone(), v.clone())).collect();
            let std_ok = eval_bool(&view, &env, &sa.precondition).unwrap_or(false);
            if std_ok && !engine.precondition_holds(st, bound, &sa.name, args) {
                let shown: Vec<String> = args.iter().map(Value::to_string).collect();
                return Some(format!("candidate refuses {}({}) where the standard allows it", sa.name, shown.join(", ")));
            }
        }
    }
    None
}

/// Outcome of replaying standard behaviour in a candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub compatible: bool,
    pub violations: Vec<Deviation>,
    /// Standard traces (including the empty one) the candidate reproduces exactly.
    pub preserved_trace_count: usize,
    pub standard_trace_count: usize,
    /// Dump of the first diverging standard trace.
    pub witness: Option<String>,
}

/// The standard concept composed with the candidate's peers through the required syncs.
pub fn standard_projection(entry: &CatalogEntry, candidate: &App, bound: &str) -> Result<App, ConformanceError> {
    let std = entry.concept.clone();
    let cand_decl = candidate.model.instance(bound).ok_or_else(|| ConformanceError::UnboundConcept(std.name.clone()))?;
    let init = cand_decl
        .init
        .iter()
        .filter(|(c, lit)| std.component(c).is_some_and(|sc| !sc.is_derived() && lit.to_value(&sc.kind).is_some()))
        .cloned()
        .collect();
    let syncs = instantiate_templates(entry, candidate, bound);
    let mut instances = vec![InstanceDecl { name: bound.to_string(), concept: std.name.clone(), implements: None, init }];
    let mut concepts = BTreeMap::new();
    concepts.insert(bound.to_string(), std.clone());
    for s in &syncs {
        let names = std::iter::once(&s.trigger.instance).chain(s.reactions.iter().map(|r| &r.instance));
        for n in names {
            if concepts.contains_key(n) {
                continue;
            }
            let decl = candidate.model.instance(n).expect("instantiated peer").clone();
            concepts.insert(n.clone(), candidate.concept_arc(n).expect("linked peer").clone());
            instances.push(decl);
        }
    }
    let model = AppModel { name: format!("{}Standard", std.name), uses: vec![], instances, syncs };
    Ok(App::from_parts(model, concepts)?)
}

struct Inclusion<'a> {
    std_engine: Engine<'a>,
    cand_engine: Engine<'a>,
    std_def: Arc<ConceptDef>,
    cand_def: &'a ConceptDef,
    bound: &'a str,
    calls: Vec<ActionCall>,
    budget: usize,
    cap: usize,
    total: usize,
    preserved: usize,
    divergences: BTreeMap<String, (String, String)>,
}

impl Inclusion<'_> {
    fn diverges(&self, std_state: &AppState, cand_state: &AppState) -> Option<String> {
        let sv = AppView::new(self.std_engine.app, std_state);
        let cv = AppView::new(self.cand_engine.app, cand_state);
        for comp in &self.std_def.state {
            if self.cand_def.component(&comp.name).is_none_or(|c| c.kind != comp.kind) {
                continue;
            }
            let a = sv.read(self.bound, &comp.name).ok();
            let b = cv.read(self.bound, &comp.name).ok();
            let same = match (&a, &b) {
                (Some(x), Some(y)) => x.loose_eq(y),
                (None, None) => true,
                _ => false,
            };
            if !same {
                let show = |v: &Option<Value>| v.as_ref().map_or("error".to_string(), Value::to_string);
                return Some(format!("{} is {} but the standard has {}", comp.name, show(&b), show(&a)));
            }
        }
        None
    }

    fn record(&mut self, prefix: &[Step], call: &ActionCall, reason: String) {
        let subject = format!("{}.{}", self.std_def.name, call.action);
        let mut witness = dump_trace(prefix);
        witness.push_str(&format!("{call}\n"));
        self.divergences.entry(subject).or_insert((reason, witness));
    }

    /// The candidate state with every same-shaped component it shares with the standard overwritten.
    fn resync(&self, cand_state: &AppState, std_state: &AppState) -> AppState {
        let mut out = cand_state.clone();
        for (inst, st) in &std_state.instances {
            let (Some(def), Some(target)) = (self.cand_engine.app.concept(inst), out.instances.get_mut(inst)) else {
                continue;
            };
            let std_def = self.std_engine.app.concept(inst).expect("projection instance");
            for (comp, v) in st {
                let (Some(c), Some(sc)) = (def.component(comp), std_def.component(comp)) else { continue };
                if !c.is_derived() && std::mem::discriminant(&c.kind) == std::mem::discriminant(&sc.kind) {
                    target.insert(comp.clone(), v.clone().coerce_to_kind(&c.kind));
                }
            }
        }
        out
    }

    /// Walks standard traces. After a missing, refused, or diverging step the candidate is
    /// resynchronized to the standard, so each action is tested from every standard state.
    /// `intact` says whether the prefix replayed faithfully.
    fn dfs(
        &mut self,
        std_state: &AppState,
        cand_state: &AppState,
        intact: bool,
        depth: usize,
        prefix: &mut Vec<Step>,
    ) -> Result<(), ConformanceError> {
        if depth == 0 {
            return Ok(());
        }
        let calls = self.calls.clone();
        for call in &calls {
            let Ok((next, step)) = self.std_engine.step(std_state, call) else { continue };
            if self.budget == 0 {
                return Err(EngineError::BudgetExceeded(self.cap).into());
            }
            self.budget -= 1;
            self.total += 1;
            let outcome = match self.cand_def.action(&call.action) {
                None => None,
                Some(_) => match self.cand_engine.step(cand_state, call) {
                    Err(e) => {
                        self.record(prefix, call, format!("candidate refuses: {e}"));
                        None
                    }
                    Ok((cn, _)) => match self.diverges(&next, &cn) {
                        Some(why) => {
                            self.record(prefix, call, why);
                            None
                        }
                        None => Some(cn),
                    },
                },
            };
            let still = intact && outcome.is_some();
            if still {
                self.preserved += 1;
            }
            let cand_next = outcome.unwrap_or_else(|| self.resync(cand_state, &next));
            prefix.push(step);
            self.dfs(&next, &cand_next, still, depth - 1, prefix)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Replays every standard trace up to `depth` (started on the bound instance) in the candidate
/// and compares the standard components after each step.
pub fn trace_inclusion(
    entry: &CatalogEntry,
    candidate: &App,
    bound: &str,
    domains: &EntityDomains,
    cfg: &CheckConfig,
) -> Result<CompatibilityReport, ConformanceError> {
    let domains = pinned_domains(candidate, domains)?;
    let projection = standard_projection(entry, candidate, bound)?;
    let std_engine = Engine::new(&projection, &domains)?;
    let cand_engine = Engine::new(candidate, &domains)?;
    let cand_def = candidate.concept(bound).ok_or_else(|| ConformanceError::UnboundConcept(entry.name.clone()))?;
    let opts = TraceOptions { state_cap: cfg.state_cap, ..TraceOptions::only(bound) };
    let calls = {
        let mut calls = Vec::new();
        for act in &entry.concept.actions {
            for role in Role::ALL.into_iter().filter(|r| act.initiator.admits(*r)) {
                for args in std_engine.domains.tuples(&act.param_sorts()) {
                    calls.push(ActionCall::new(bound, &act.name, args, role));
                }
            }
        }
        calls
    };
    let mut inc = Inclusion {
        std_def: entry.concept.clone(),
        cand_def,
        bound,
        calls,
        budget: opts.state_cap,
        cap: opts.state_cap,
        total: 1,
        preserved: 1,
        divergences: BTreeMap::new(),
        std_engine,
        cand_engine,
    };
    let (s0, c0) = (inc.std_engine.init_state(), inc.cand_engine.init_state());
    let depth = cfg.depth;
    inc.dfs(&s0, &c0, true, depth, &mut Vec::new())?;
    let mut witness = None;
    let violations: Vec<Deviation> = inc
        .divergences
        .iter()
        .map(|(subject, (reason, w))| {
            witness.get_or_insert_with(|| w.clone());
            Deviation::new(Category::BehaviorMismatch, subject.clone(), Dyad::ImplementedVsExpected, reason.clone())
        })
        .collect();
    Ok(CompatibilityReport {
        compatible: violations.is_empty(),
        violations,
        preserved_trace_count: inc.preserved,
        standard_trace_count: inc.total,
        witness,
    })
}

/// Findings for one candidate design, each judged dark or not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationReport {
    pub standard: String,
    pub binding: Option<Binding>,
    pub findings: Vec<DarkFinding>,
}

impl DeviationReport {
    pub fn is_dark(&self) -> bool {
        self.findings.iter().any(|f| f.dark)
    }

    pub fn deviations(&self) -> impl Iterator<Item = &Deviation> {
        self.findings.iter().map(|f| &f.deviation)
    }

    /// Machine format: one `DARK|OK <dyad> <category> <subject> <evidence>` line per finding.
    pub fn lines(&self) -> Vec<String> {
        self.findings.iter().map(DarkFinding::line).collect()
    }

    /// 0 without dark findings, 2 with.
    pub fn exit_code(&self) -> i32 {
        if self.is_dark() {
            2
        } else {
            0
        }
    }
}

/// Everything that can be found wrong with a candidate, before the benefit judgement.
pub fn find_deviations(
    entry: &CatalogEntry,
    candidate: &App,
    ui: Option<&UiModel>,
    registry: &ConventionRegistry,
    cfg: &CheckConfig,
    domains: &EntityDomains,
) -> Result<(Option<Binding>, Vec<Deviation>), ConformanceError> {
    let Some(binding) = bind(entry, candidate, ui, registry, cfg) else {
        return match ui {
            Some(_) => Ok((None, Vec::new())),
            None => Err(ConformanceError::UnboundConcept(entry.concept_name().to_string())),
        };
    };
    let bound = binding.instance.as_str();
    let mut devs = structural_diff(entry, candidate, bound, domains, cfg)?;
    let flagged: BTreeSet<String> =
        devs.iter().filter(|d| d.category != Category::Extension).map(|d| d.subject.clone()).collect();
    let inc = trace_inclusion(entry, candidate, bound, domains, cfg)?;
    devs.extend(inc.violations.into_iter().filter(|d| !flagged.contains(&d.subject)));
    if let Some(ui) = ui {
        let engine = Engine::new(candidate, domains)?;
        let opts = TraceOptions { state_cap: cfg.state_cap, ..TraceOptions::default() };
        let samples = engine.reachable_states(cfg.sample_depth, &opts)?;
        let ctx = MappingContext {
            engine: &engine,
            ui,
            registry,
            cfg,
            bound: Some(bound),
            standard: Some(entry.concept.as_ref()),
            independent: &entry.independent,
            standards: &entry.mapping,
            samples,
        };
        devs.extend(check_all(&ctx));
    }
    normalize(&mut devs);
    Ok((Some(binding), devs))
}

/// Full check of a candidate design against a catalog entry, with the darkness judgement.
pub fn check(
    entry: &CatalogEntry,
    candidate: &App,
    ui: Option<&UiModel>,
    benefit: &BenefitAnnotation,
    cfg: &CheckConfig,
    domains: &EntityDomains,
) -> Result<DeviationReport, ConformanceError> {
    check_with_registry(entry, candidate, ui, benefit, cfg, domains, &ConventionRegistry::standard())
}

pub fn check_with_registry(
    entry: &CatalogEntry,
    candidate: &App,
    ui: Option<&UiModel>,
    benefit: &BenefitAnnotation,
    cfg: &CheckConfig,
    domains: &EntityDomains,
    registry: &ConventionRegistry,
) -> Result<DeviationReport, ConformanceError> {
    let (binding, devs) = find_deviations(entry, candidate, ui, registry, cfg, domains)?;
    let findings = devs
        .into_iter()
        .map(|d| {
            let b = benefit.beneficiary_of(&d.subject);
            DarkFinding::judge(d, b)
        })
        .collect();
    Ok(DeviationReport { standard: entry.concept_name().to_string(), binding, findings })
}

/// Whether an extension keeps the core's structure and behaviour. Pure additions are compatible.
pub fn check_extension(
    entry: &CatalogEntry,
    ext: &App,
    ui: Option<&UiModel>,
    cfg: &CheckConfig,
    domains: &EntityDomains,
) -> Result<CompatibilityReport, ConformanceError> {
    let registry = ConventionRegistry::standard();
    let binding = bind(entry, ext, ui, &registry, cfg)
        .ok_or_else(|| ConformanceError::UnboundConcept(entry.concept_name().to_string()))?;
    let bound = binding.instance.as_str();
    let mut violations: Vec<Deviation> = structural_diff(entry, ext, bound, domains, cfg)?
        .into_iter()
        .filter(|d| d.category != Category::Extension)
        .collect();
    let inc = trace_inclusion(entry, ext, bound, domains, cfg)?;
    violations.extend(inc.violations);
    if let Some(ui) = ui {
        let (_, devs) = find_deviations(entry, ext, Some(ui), &registry, cfg, domains)?;
        violations.extend(devs.into_iter().filter(|d| d.category != Category::Extension));
    }
    normalize(&mut violations);
    Ok(CompatibilityReport {
        compatible: violations.is_empty(),
        violations,
        preserved_trace_count: inc.preserved_trace_count,
        standard_trace_count: inc.standard_trace_count,
        witness: inc.witness,
    })
}

/// Checks an entry's standard design against the entry itself; a sound entry reports nothing.
pub fn self_check(entry: &CatalogEntry, cfg: &CheckConfig) -> Result<DeviationReport, ConformanceError> {
    check(
        entry,
        &entry.standard_app,
        entry.standard_ui.as_ref(),
        &BenefitAnnotation::default(),
        cfg,
        &entry.domain,
    )
}
