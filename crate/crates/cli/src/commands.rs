//! Subcommand bodies. Each returns its buffered output and exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use conceptkit::catalog::{
    builtin_files, load_builtin_catalog, run_builtin_corpus, run_corpus, run_scenario, Catalog, CorpusReport,
    LoadError, Loader, Location, ScenarioOutcome,
};
use conceptkit::conformance::{check as check_design, self_check, BenefitAnnotation, BindingSource, DeviationReport};
use conceptkit::engine::{parse_script, Engine, EntityDomains, StepError};
use conceptkit::lang::{self, print_concept, print_entry, FileKind};
use conceptkit::{validate_concept, App, Beneficiary};

use crate::config::{CliConfig, Format};

pub const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    pub fn fail(msg: impl std::fmt::Display) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {msg}\n"), code: 1 }
    }
}

impl From<LoadError> for Outcome {
    fn from(e: LoadError) -> Self {
        Outcome::fail(e)
    }
}

fn paint(cfg: &CliConfig, code: &str, s: &str) -> String {
    if cfg.color {
        format!("\x1b[{code}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

/// `builtin:<path>` names a shipped file; anything else is a disk path.
pub fn location(arg: &str) -> Location {
    match arg.strip_prefix(BUILTIN_PREFIX) {
        Some(p) => Location::builtin(p),
        None => Location::Disk(PathBuf::from(arg)),
    }
}

fn catalog(loader: &Loader) -> Result<Catalog, Outcome> {
    load_builtin_catalog(loader).map_err(Outcome::from)
}

fn validate_one(loader: &Loader, arg: &str) -> Result<(), LoadError> {
    let loc = location(arg);
    let src = loader.read(&loc)?;
    let parsed =
        lang::parse_source(Path::new(arg), &src).map_err(|source| LoadError::Parse { path: loc.to_string(), source })?;
    match parsed.kind() {
        FileKind::Concept => {
            let def = lang::parse_concept(&src).map_err(|source| LoadError::Parse { path: loc.to_string(), source })?;
            let errors = validate_concept(&def);
            if !errors.is_empty() {
                return Err(LoadError::Invalid { path: loc.to_string(), errors });
            }
        }
        FileKind::App => {
            loader.load_app(&loc)?;
        }
        FileKind::Entry => {
            loader.load_entry(&loc)?;
        }
        FileKind::Ui | FileKind::Scenario => {}
    }
    Ok(())
}

pub fn validate(paths: &[String]) -> Outcome {
    let loader = Loader::new();
    let mut out = Outcome::default();
    for p in paths {
        match validate_one(&loader, p) {
            Ok(()) => writeln!(out.stdout, "OK {p}").unwrap(),
            Err(e) => {
                writeln!(out.stdout, "ERROR {e}").unwrap();
                if let LoadError::Invalid { errors, .. } = &e {
                    for err in errors.iter().skip(1) {
                        writeln!(out.stdout, "  {err}").unwrap();
                    }
                }
                out.code = 1;
            }
        }
    }
    out
}

fn parse_domain(arg: &str) -> Result<(String, Vec<String>), String> {
    let (sort, ids) = arg.split_once('=').ok_or_else(|| format!("bad domain {arg}; expected SORT=a,b"))?;
    let ids: Vec<String> = ids.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    Ok((sort.trim().to_string(), ids))
}

/// Domains from every catalog entry whose concept the app uses, then the explicit ones.
fn domains_for(app: &App, cat: &Catalog, explicit: &[String]) -> Result<EntityDomains, String> {
    let mut dom = EntityDomains::new();
    for inst in app.instance_names() {
        if let Some(def) = app.concept(inst) {
            if let Some(e) = cat.entries.iter().find(|e| e.concept.name == def.name) {
                dom = dom.overlay(&e.domain);
            }
        }
    }
    for d in explicit {
        let (sort, ids) = parse_domain(d)?;
        match sort.as_str() {
            "Nat" | "Money" => {
                let vals = ids.iter().map(|s| s.parse::<i64>().map_err(|e| format!("{s}: {e}"))).collect::<Result<_, _>>()?;
                if sort == "Nat" {
                    dom.nat = Some(vals);
                } else {
                    dom.money = Some(vals);
                }
            }
            "Text" => dom.text = Some(ids),
            _ => {
                dom.entities.insert(sort, ids);
            }
        }
    }
    Ok(dom)
}

pub fn simulate(app: &str, script: Option<&Path>, calls: Option<&str>, domains: &[String], show_state: bool) -> Outcome {
    let loader = Loader::new();
    let cat = match catalog(&loader) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let app = match loader.load_app(&location(app)) {
        Ok(a) => a,
        Err(e) => return e.into(),
    };
    let text = match (script, calls) {
        (Some(p), _) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return Outcome::fail(format!("{}: {e}", p.display())),
        },
        (None, Some(c)) => c.to_string(),
        (None, None) => String::new(),
    };
    let dom = match domains_for(&app, &cat, domains) {
        Ok(d) => d,
        Err(e) => return Outcome::fail(e),
    };
    let engine = match Engine::new(&app, &dom) {
        Ok(e) => e,
        Err(e) => return Outcome::fail(e),
    };
    let calls = match parse_script(&app, &text) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(format!("script: {e}")),
    };
    let mut out = Outcome::default();
    let mut state = engine.init_state();
    for (i, call) in calls.iter().enumerate() {
        match engine.step(&state, call) {
            Ok((next, step)) => {
                writeln!(out.stdout, "{step}").unwrap();
                state = next;
            }
            Err(e) => {
                writeln!(out.stderr, "error: step {} `{call}`: {e}", i + 1).unwrap();
                if let StepError::PreconditionFailed { detail: Some(d), .. } = &e {
                    writeln!(out.stderr, "  failed: {d}").unwrap();
                }
                writeln!(out.stderr, "  kind: {}", step_error_kind(&e)).unwrap();
                out.code = 2;
                break;
            }
        }
    }
    if show_state {
        write!(out.stdout, "{state}").unwrap();
    }
    out
}

fn step_error_kind(e: &StepError) -> &'static str {
    match e {
        StepError::PreconditionFailed { .. } => "PreconditionFailed",
        StepError::InitiatorForbidden { .. } => "InitiatorForbidden",
        StepError::CycleDetected => "CycleDetected",
        StepError::UnknownInstance(_) => "UnknownInstance",
        StepError::UnknownAction(_) => "UnknownAction",
        StepError::Arity { .. } => "Arity",
        StepError::ArgSort { .. } => "ArgSort",
        StepError::Effect { .. } => "Effect",
        StepError::ReactionArg { .. } => "ReactionArg",
    }
}

pub enum CheckTarget {
    Scenario(String),
    Design { standard: String, app: String, ui: Option<String>, benefit: String },
    SelfCheck(String),
}

fn render_report(r: &DeviationReport, cfg: &CliConfig) -> String {
    let mut s = String::new();
    if cfg.format == Format::Lines {
        for l in r.lines() {
            writeln!(s, "{l}").unwrap();
        }
        return s;
    }
    write!(s, "standard {}", r.standard).unwrap();
    match &r.binding {
        Some(b) => match &b.source {
            BindingSource::Declared => writeln!(s, ", bound to {} (declared)", b.instance).unwrap(),
            BindingSource::Evoked(idioms) => {
                writeln!(s, ", bound to {} (evoked by {})", b.instance, idioms.join(", ")).unwrap()
            }
        },
        None => writeln!(s, ", unbound").unwrap(),
    }
    for f in &r.findings {
        let d = &f.deviation;
        let tag = if f.dark { paint(cfg, "1;31", "DARK") } else { paint(cfg, "32", "OK  ") };
        writeln!(s, "{tag} {} {} [{}]", d.category, d.subject, d.dyad).unwrap();
        for line in d.evidence.lines() {
            writeln!(s, "     {line}").unwrap();
        }
    }
    let dark = r.findings.iter().filter(|f| f.dark).count();
    writeln!(s, "{} finding(s), {dark} dark", r.findings.len()).unwrap();
    s
}

fn parse_beneficiary(s: &str) -> Result<Beneficiary, String> {
    match s {
        "user" => Ok(Beneficiary::User),
        "provider" => Ok(Beneficiary::Provider),
        "neutral" => Ok(Beneficiary::Neutral),
        _ => Err(format!("unknown beneficiary {s}; expected user, provider, or neutral")),
    }
}

fn scenario_note(o: &ScenarioOutcome) -> String {
    if o.passed {
        "expectations met\n".to_string()
    } else {
        format!("expectations not met: {}\n", o.summary())
    }
}

pub fn check(target: &CheckTarget, cfg: &CliConfig) -> Outcome {
    let loader = Loader::new();
    let cat = match catalog(&loader) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let mut note = String::new();
    let report = match target {
        CheckTarget::Scenario(path) => match run_scenario(&cat, &loader, &location(path), &cfg.check) {
            Ok(o) => {
                note = scenario_note(&o);
                o.report.map_err(|e| e.to_string())
            }
            Err(e) => return e.into(),
        },
        CheckTarget::SelfCheck(name) => match cat.require(name) {
            Ok(entry) => self_check(entry, &cfg.check).map_err(|e| e.to_string()),
            Err(e) => return e.into(),
        },
        CheckTarget::Design { standard, app, ui, benefit } => {
            let entry = match cat.require(standard) {
                Ok(e) => e,
                Err(e) => return e.into(),
            };
            let app = match loader.load_app(&location(app)) {
                Ok(a) => a,
                Err(e) => return e.into(),
            };
            let ui = match ui.as_deref().map(|u| loader.load_ui(&location(u))).transpose() {
                Ok(u) => u,
                Err(e) => return e.into(),
            };
            let benefit = match parse_beneficiary(benefit) {
                Ok(b) => BenefitAnnotation::uniform(b),
                Err(e) => return Outcome::fail(e),
            };
            check_design(entry, &app, ui.as_ref(), &benefit, &cfg.check, &entry.domain).map_err(|e| e.to_string())
        }
    };
    match report {
        Ok(r) => {
            let mut stdout = render_report(&r, cfg);
            if cfg.format == Format::Text {
                stdout.push_str(&note);
            }
            Outcome { stdout, stderr: String::new(), code: r.exit_code() as u8 }
        }
        Err(e) => Outcome::fail(e),
    }
}

fn render_corpus(r: &CorpusReport, cfg: &CliConfig) -> String {
    let mut s = String::new();
    for o in &r.outcomes {
        let line = o.summary();
        let line = match line.split_once(' ') {
            Some((status, rest)) if cfg.format == Format::Text => {
                format!("{} {rest}", paint(cfg, if o.passed { "32" } else { "1;31" }, status))
            }
            _ => line,
        };
        writeln!(s, "{line}").unwrap();
    }
    writeln!(s, "{}/{} PASS", r.passed(), r.total()).unwrap();
    s
}

pub fn corpus(dir: Option<&Path>, all: bool, cfg: &CliConfig) -> Outcome {
    let loader = Loader::new();
    let cat = match catalog(&loader) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let report = match dir {
        Some(d) => {
            if !d.is_dir() {
                return Outcome::fail(format!("{}: not a directory", d.display()));
            }
            run_corpus(&cat, &loader, d, &cfg.check)
        }
        None => {
            let dirs: &[&str] = if all { &["scenarios/patterns", "scenarios/cases"] } else { &["scenarios/patterns"] };
            dirs.iter()
                .map(|d| run_builtin_corpus(&cat, &loader, d, &cfg.check))
                .try_fold(CorpusReport::default(), |mut acc, r| {
                    acc.outcomes.extend(r?.outcomes);
                    Ok(acc)
                })
        }
    };
    match report {
        Ok(r) => Outcome { stdout: render_corpus(&r, cfg), stderr: String::new(), code: u8::from(!r.all_passed()) },
        Err(e) => e.into(),
    }
}

pub fn catalog_list() -> Outcome {
    let loader = Loader::new();
    let cat = match catalog(&loader) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let mut out = Outcome::default();
    for e in &cat.entries {
        writeln!(
            out.stdout,
            "{} concept {}, {} action(s), {} variant(s)",
            e.name,
            e.concept_name(),
            e.concept.actions.len(),
            e.variants.len()
        )
        .unwrap();
    }
    out
}

pub fn catalog_show(name: &str) -> Outcome {
    let loader = Loader::new();
    let cat = match catalog(&loader) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let entry = match cat.require(name) {
        Ok(e) => e,
        Err(e) => return e.into(),
    };
    let file = builtin_files("catalog", "catalog")
        .into_iter()
        .filter_map(|p| loader.load_entry_file(&Location::builtin(p)).ok())
        .find(|f| f.name == entry.name);
    let mut out = Outcome::default();
    if let Some(f) = file {
        out.stdout.push_str(&print_entry(&f));
        out.stdout.push('\n');
    }
    out.stdout.push_str(&print_concept(&entry.concept));
    out
}
