use std::fmt::Write as _;

use crate::catalog::{EntryFile, Scenario};
use crate::engine::EntityDomains;
use crate::model::{
    AppModel, ArgPattern, ComponentKind, ConceptDef, Expr, Literal, StatePath, SyncRule, UpdateStmt, ValueLit,
};
use crate::ui::{ControlScope, MappingStandard, UiBinding, UiElement, UiModel, UiRef};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, _, _) => op.precedence(),
        Expr::Not(_) => 3,
        _ => 10,
    }
}

fn path(p: &StatePath) -> String {
    p.to_string()
}

/// Renders an expression with the minimal parentheses needed to parse back to the same tree.
pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_child(out: &mut String, e: &Expr, paren: bool) {
    if paren {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Lit(l) => match l {
            Literal::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Literal::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Literal::Text(t) => out.push_str(&quote(t)),
            Literal::Entity(id) => {
                let _ = write!(out, "@{id}");
            }
            Literal::None => out.push_str("none"),
        },
        Expr::Var(v) => out.push_str(v),
        Expr::State { path: p, key } => {
            out.push_str(&path(p));
            if let Some(k) = key {
                out.push('[');
                write_expr(out, k);
                out.push(']');
            }
        }
        Expr::Not(inner) => {
            out.push_str("not ");
            write_child(out, inner, expr_prec(inner) < 3);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            write_child(out, l, expr_prec(l) < p);
            let _ = write!(out, " {} ", op.symbol());
            write_child(out, r, expr_prec(r) <= p);
        }
        Expr::Card(inner) => {
            out.push('|');
            write_expr(out, inner);
            out.push('|');
        }
        Expr::Sum { var, over, body } => {
            let _ = write!(out, "sum({var} in {}: ", path(over));
            write_expr(out, body);
            out.push(')');
        }
    }
}

/// Value literals; entities print bare unless `at` is set.
fn value_lit(v: &ValueLit, at: bool) -> String {
    match v {
        ValueLit::Int(n) => n.to_string(),
        ValueLit::Bool(b) => b.to_string(),
        ValueLit::Text(t) => quote(t),
        ValueLit::Entity(id) if at => format!("@{id}"),
        ValueLit::Entity(id) => id.clone(),
        ValueLit::None => "none".to_string(),
        ValueLit::Empty => "{}".to_string(),
        ValueLit::Set(items) => {
            let parts: Vec<String> = items.iter().map(|i| value_lit(i, false)).collect();
            format!("{{{}}}", parts.join(", "))
        }
        ValueLit::Map(entries) => {
            let parts: Vec<String> =
                entries.iter().map(|(k, v)| format!("{}: {}", value_lit(k, false), value_lit(v, false))).collect();
            format!("{{{}}}", parts.join(", "))
        }
    }
}

fn stmt(s: &UpdateStmt) -> String {
    match s {
        UpdateStmt::Insert { set, elem } => format!("{set} += {}", print_expr(elem)),
        UpdateStmt::Remove { set, elem } => format!("{set} -= {}", print_expr(elem)),
        UpdateStmt::Put { map, key, value } => format!("{map}[{}] := {}", print_expr(key), print_expr(value)),
        UpdateStmt::Drop { map, key } => format!("drop {map}[{}]", print_expr(key)),
        UpdateStmt::Assign { target, value } => format!("{target} := {}", print_expr(value)),
        UpdateStmt::Clear { target } => format!("clear {target}"),
    }
}

pub fn print_concept(c: &ConceptDef) -> String {
    let mut out = format!("concept {}", c.name);
    if !c.type_params.is_empty() {
        let _ = write!(out, " [{}]", c.type_params.join(", "));
    }
    let _ = writeln!(out, "\npurpose {}", quote(&c.purpose));
    if !c.state.is_empty() {
        out.push_str("\nstate\n");
        for s in &c.state {
            if let Some(d) = &s.derived {
                let _ = writeln!(out, "  derived {}: {} = {}", s.name, s.kind.value_sort(), print_expr(d));
                continue;
            }
            let kind = match &s.kind {
                ComponentKind::Scalar(sort) => format!("one {sort}"),
                ComponentKind::Set(e) => format!("set {e}"),
                ComponentKind::Map(k, v) => format!("{k} -> {v}"),
            };
            let _ = write!(out, "  {}: {kind}", s.name);
            if let Some(init) = &s.init {
                let _ = write!(out, " = {}", value_lit(init, false));
            }
            out.push('\n');
        }
    }
    if !c.actions.is_empty() {
        out.push_str("\nactions\n");
        for a in &c.actions {
            let params: Vec<String> = a.params.iter().map(|p| format!("{}: {}", p.name, p.sort)).collect();
            let _ = writeln!(out, "  {}({}) by {}", a.name, params.join(", "), a.initiator.keyword());
            if !a.precondition.is_truth() {
                let _ = writeln!(out, "    requires {}", print_expr(&a.precondition));
            }
            if !a.effects.is_empty() {
                let effs: Vec<String> = a.effects.iter().map(stmt).collect();
                let _ = writeln!(out, "    effects {}", effs.join("; "));
            }
        }
    }
    out
}

fn pattern(p: &ArgPattern, var_allowed: bool) -> String {
    match p {
        ArgPattern::Any => "_".to_string(),
        ArgPattern::Var(v) if var_allowed => v.clone(),
        ArgPattern::Var(v) => v.clone(),
        ArgPattern::Lit(l) => value_lit(l, var_allowed),
    }
}

fn sync_rule(out: &mut String, s: &SyncRule) {
    let pats: Vec<String> = s.trigger.pattern.iter().map(|p| pattern(p, true)).collect();
    let _ = writeln!(out, "sync {} when {}.{}({})", s.name, s.trigger.instance, s.trigger.action, pats.join(", "));
    for (i, r) in s.reactions.iter().enumerate() {
        let args: Vec<String> = r.args.iter().map(print_expr).collect();
        let lead = if i == 0 { "  then" } else { "      " };
        let _ = writeln!(out, "{lead} {}.{}({})", r.instance, r.action, args.join(", "));
    }
}

pub fn print_app(a: &AppModel) -> String {
    let mut out = format!("app {}\n", a.name);
    for u in &a.uses {
        let _ = writeln!(out, "use {}", quote(u));
    }
    if !a.instances.is_empty() {
        out.push('\n');
    }
    for i in &a.instances {
        let _ = write!(out, "instance {}: {}", i.name, i.concept);
        if let Some(imp) = &i.implements {
            let _ = write!(out, " implements {imp}");
        }
        if !i.init.is_empty() {
            out.push_str(" init {\n");
            for (k, v) in &i.init {
                let _ = writeln!(out, "  {k} = {}", value_lit(v, false));
            }
            out.push('}');
        }
        out.push('\n');
    }
    if !a.syncs.is_empty() {
        out.push('\n');
    }
    for s in &a.syncs {
        sync_rule(&mut out, s);
    }
    out
}

fn ui_ref(r: &UiRef) -> String {
    match &r.key {
        Some(k) => format!("{}.{}[{}]", r.instance, r.component, value_lit(k, false)),
        None => format!("{}.{}", r.instance, r.component),
    }
}

fn element(out: &mut String, e: &UiElement) {
    let _ = write!(out, "  element {}: {} label {}", e.id, e.kind.keyword(), quote(&e.label));
    match &e.binding {
        UiBinding::Triggers { call, default_on, enabled_when } => {
            let args: Vec<String> = call.args.iter().map(|p| pattern(p, false)).collect();
            let _ = write!(out, "\n    triggers {}.{}({})", call.instance, call.action, args.join(", "));
            if *default_on {
                out.push_str(" default on");
            }
            if let Some(g) = enabled_when {
                let _ = write!(out, " enabled when {}", print_expr(g));
            }
        }
        UiBinding::Displays(r) => {
            let _ = write!(out, "\n    displays {}", ui_ref(r));
        }
        UiBinding::Claims { claimed, shown } => {
            let _ = write!(out, "\n    claims {} shows {}", ui_ref(claimed), print_expr(shown));
        }
        UiBinding::Static => out.push_str("\n    static"),
    }
    let _ = write!(out, "\n    prominence {} steps {}", e.prominence, e.steps);
    if let Some(s) = &e.style {
        let _ = write!(out, " style {}", quote(s));
    }
    if let Some(c) = &e.convention {
        let _ = write!(out, " convention {}", quote(c));
    }
    if let Some(p) = &e.paired {
        let _ = write!(out, " paired {p}");
    }
    if !e.visible {
        out.push_str(" hidden");
    }
    out.push('\n');
}

pub fn print_ui(u: &UiModel) -> String {
    let mut out = String::new();
    if let Some(n) = &u.name {
        let _ = writeln!(out, "ui {n}\n");
    }
    for (i, s) in u.screens.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "screen {} {{", s.name);
        for e in &s.elements {
            element(&mut out, e);
        }
        out.push_str("}\n");
    }
    out
}

fn domain(out: &mut String, d: &EntityDomains, indent: &str) {
    let _ = writeln!(out, "{indent}domain {{");
    for (sort, ids) in &d.entities {
        let _ = writeln!(out, "{indent}  {sort} = {{{}}}", ids.join(", "));
    }
    let ints = |v: &Vec<i64>| v.iter().map(i64::to_string).collect::<Vec<_>>().join(", ");
    if let Some(n) = &d.nat {
        let _ = writeln!(out, "{indent}  Nat = {{{}}}", ints(n));
    }
    if let Some(m) = &d.money {
        let _ = writeln!(out, "{indent}  Money = {{{}}}", ints(m));
    }
    if let Some(t) = &d.text {
        let texts: Vec<String> = t.iter().map(|s| quote(s)).collect();
        let _ = writeln!(out, "{indent}  Text = {{{}}}", texts.join(", "));
    }
    let _ = writeln!(out, "{indent}}}");
}

fn mapping_rule(m: &MappingStandard) -> String {
    match m {
        MappingStandard::RequireDisplay { state } => format!("display {state}"),
        MappingStandard::RequireControl { action, scope: ControlScope::Global } => format!("control {action}"),
        MappingStandard::RequireControl { action, scope: ControlScope::PerItem } => {
            format!("control {action} per item")
        }
        MappingStandard::LabelReservation { label, state } => format!("label {} reserved for {state}", quote(label)),
        MappingStandard::GuardedControl { action, guard } => format!("guard {action} when {}", print_expr(guard)),
        MappingStandard::EqualProminence { first, second } => format!("prominence {first} {second}"),
        MappingStandard::ReachParity { first, second, max_ratio } => match max_ratio {
            Some(r) => format!("reach {first} then {second} ratio {r}"),
            None => format!("reach {first} then {second}"),
        },
        MappingStandard::ConsistencyGroup { subject } => format!("consistent {subject}"),
    }
}

pub fn print_entry(e: &EntryFile) -> String {
    let mut out = format!("entry {}\nconcept {}\nstandard app {}", e.name, quote(&e.concept), quote(&e.standard_app));
    if let Some(u) = &e.standard_ui {
        let _ = write!(out, " ui {}", quote(u));
    }
    out.push('\n');
    if !e.domain.is_empty() {
        domain(&mut out, &e.domain, "");
    }
    if !e.syncs.is_empty() {
        out.push('\n');
    }
    for s in &e.syncs {
        sync_rule(&mut out, s);
    }
    if !e.independent.is_empty() {
        out.push('\n');
    }
    for a in &e.independent {
        let _ = writeln!(out, "independent {a}");
    }
    if !e.mapping.is_empty() {
        out.push_str("\nmapping {\n");
        for m in &e.mapping {
            let _ = writeln!(out, "  {}", mapping_rule(m));
        }
        out.push_str("}\n");
    }
    if !e.variants.is_empty() {
        out.push('\n');
    }
    for v in &e.variants {
        let _ = write!(out, "variant {} {}", v.name, quote(&v.app));
        if let Some(u) = &v.ui {
            let _ = write!(out, " ui {}", quote(u));
        }
        let _ = writeln!(out, " {}", if v.compatible { "compatible" } else { "conflicting" });
    }
    out
}

pub fn print_scenario(s: &Scenario) -> String {
    let mut out = format!("scenario {} {{\n  standard {}\n  app {}\n", s.name, s.standard, quote(&s.app));
    if let Some(u) = &s.ui {
        let _ = writeln!(out, "  ui {}", quote(u));
    }
    if let Some(d) = &s.domain {
        domain(&mut out, d, "  ");
    }
    let _ = writeln!(out, "  benefit {}", s.benefit.default.keyword());
    for (subj, b) in &s.benefit.overrides {
        let _ = writeln!(out, "  override {subj} = {}", b.keyword());
    }
    out.push_str("  expect\n");
    for e in &s.expected {
        let _ = writeln!(out, "    {} on {} dyad {}", e.category, e.subject, e.dyad.keyword());
    }
    let _ = writeln!(out, "  dark {}\n}}", s.expected_dark);
    out
}
