//! Static checks for concept definitions: name resolution, sorts, and write targets.

use std::collections::BTreeSet;
use std::fmt;

use super::concept::{ComponentKind, ConceptDef, Sort, UpdateStmt};
use super::expr::{BinOp, Expr, Literal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StaticErrorKind {
    DuplicateState,
    DuplicateAction,
    DuplicateParam,
    UnknownSort,
    UnknownStateRef,
    UnknownVariable,
    QualifiedRef,
    SortMismatch,
    KindMismatch,
    DerivedWriteError,
    DerivedRefersDerived,
    BadSumDomain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticError {
    pub kind: StaticErrorKind,
    /// Where the problem is, e.g. `ShoppingCart.add.requires`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for StaticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.location, self.kind, self.message)
    }
}

/// Inferred type of an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Bool,
    Nat,
    Money,
    Text,
    /// `None` for `none` and `@id` literals, compatible with every entity sort.
    Entity(Option<String>),
    Set(String),
    Map(Sort, Sort),
}

impl Ty {
    fn of_sort(s: &Sort) -> Ty {
        match s {
            Sort::Entity(e) => Ty::Entity(Some(e.clone())),
            Sort::Nat => Ty::Nat,
            Sort::Money => Ty::Money,
            Sort::Bool => Ty::Bool,
            Sort::Text => Ty::Text,
        }
    }

    fn of_kind(k: &ComponentKind) -> Ty {
        match k {
            ComponentKind::Scalar(s) => Ty::of_sort(s),
            ComponentKind::Set(e) => Ty::Set(e.clone()),
            ComponentKind::Map(a, b) => Ty::Map(a.clone(), b.clone()),
        }
    }

    fn numeric(&self) -> bool {
        matches!(self, Ty::Nat | Ty::Money)
    }

    fn compatible(&self, other: &Ty) -> bool {
        match (self, other) {
            (a, b) if a.numeric() && b.numeric() => true,
            (Ty::Entity(None), Ty::Entity(_)) | (Ty::Entity(_), Ty::Entity(None)) => true,
            (a, b) => a == b,
        }
    }

    /// Can a value of type `self` be stored where `sort` is declared?
    fn fits(&self, sort: &Sort) -> bool {
        match (self, sort) {
            (Ty::Nat, Sort::Nat) | (Ty::Nat | Ty::Money, Sort::Money) => true,
            // Nat-declared targets accept Money-typed arithmetic only if it stays non-negative at
            // runtime; statically we require Nat.
            (t, s) => t.compatible(&Ty::of_sort(s)) && !matches!((t, s), (Ty::Money, Sort::Nat)),
        }
    }
}

struct Checker<'a> {
    def: &'a ConceptDef,
    errors: Vec<StaticError>,
}

impl Checker<'_> {
    fn err(&mut self, kind: StaticErrorKind, location: &str, message: impl Into<String>) {
        self.errors.push(StaticError { kind, location: location.to_string(), message: message.into() });
    }

    fn check_sort(&mut self, s: &Sort, loc: &str) {
        if let Sort::Entity(e) = s {
            if !self.def.type_params.contains(e) {
                self.err(StaticErrorKind::UnknownSort, loc, format!("entity sort {e} is not a type parameter"));
            }
        }
    }

    /// Returns `None` when the expression is ill-formed (an error has been recorded).
    fn infer(&mut self, e: &Expr, scope: &[(String, Sort)], loc: &str, in_derived: bool) -> Option<Ty> {
        match e {
            Expr::Lit(l) => Some(match l {
                Literal::Int(n) if *n >= 0 => Ty::Nat,
                Literal::Int(_) => Ty::Money,
                Literal::Bool(_) => Ty::Bool,
                Literal::Text(_) => Ty::Text,
                Literal::Entity(_) | Literal::None => Ty::Entity(None),
            }),
            Expr::Var(name) => match scope.iter().rev().find(|(n, _)| n == name) {
                Some((_, s)) => Some(Ty::of_sort(s)),
                None => {
                    self.err(StaticErrorKind::UnknownVariable, loc, format!("unknown name {name}"));
                    None
                }
            },
            Expr::State { path, key } => {
                if path.instance.is_some() {
                    self.err(StaticErrorKind::QualifiedRef, loc, format!("{path}: concepts may only read their own state"));
                    return None;
                }
                let comp = match self.def.component(&path.component) {
                    Some(c) => c,
                    None => {
                        self.err(StaticErrorKind::UnknownStateRef, loc, format!("undeclared state component {}", path.component));
                        return None;
                    }
                };
                if in_derived && comp.is_derived() {
                    self.err(StaticErrorKind::DerivedRefersDerived, loc, format!("derivation reads derived component {}", comp.name));
                }
                let kind = comp.kind.clone();
                match (key, &kind) {
                    (None, k) => Some(Ty::of_kind(k)),
                    (Some(k), ComponentKind::Map(ks, vs)) => {
                        let kt = self.infer(k, scope, loc, in_derived)?;
                        if !kt.compatible(&Ty::of_sort(ks)) {
                            self.err(StaticErrorKind::SortMismatch, loc, format!("key of {} must be {ks}", path.component));
                        }
                        Some(Ty::of_sort(vs))
                    }
                    (Some(_), _) => {
                        self.err(StaticErrorKind::KindMismatch, loc, format!("{} is not a map", path.component));
                        None
                    }
                }
            }
            Expr::Not(inner) => {
                let t = self.infer(inner, scope, loc, in_derived)?;
                self.expect(&t, &Ty::Bool, loc, "operand of not");
                Some(Ty::Bool)
            }
            Expr::Card(inner) => {
                let t = self.infer(inner, scope, loc, in_derived)?;
                if !matches!(t, Ty::Set(_) | Ty::Map(_, _)) {
                    self.err(StaticErrorKind::SortMismatch, loc, "cardinality needs a set or map");
                }
                Some(Ty::Nat)
            }
            Expr::Sum { var, over, body } => {
                if over.instance.is_some() {
                    self.err(StaticErrorKind::QualifiedRef, loc, format!("{over}: concepts may only read their own state"));
                    return None;
                }
                let elem = match self.def.component(&over.component).map(|c| &c.kind) {
                    Some(ComponentKind::Set(e)) => e.clone(),
                    Some(_) => {
                        self.err(StaticErrorKind::BadSumDomain, loc, format!("sum over {} which is not a set", over.component));
                        return None;
                    }
                    None => {
                        self.err(StaticErrorKind::UnknownStateRef, loc, format!("undeclared state component {}", over.component));
                        return None;
                    }
                };
                let mut inner = scope.to_vec();
                inner.push((var.clone(), Sort::Entity(elem)));
                let t = self.infer(body, &inner, loc, in_derived)?;
                if !t.numeric() {
                    self.err(StaticErrorKind::SortMismatch, loc, "sum body must be numeric");
                }
                Some(t)
            }
            Expr::Binary(op, l, r) => {
                let lt = self.infer(l, scope, loc, in_derived);
                let rt = self.infer(r, scope, loc, in_derived);
                let (lt, rt) = (lt?, rt?);
                match op {
                    BinOp::And | BinOp::Or => {
                        self.expect(&lt, &Ty::Bool, loc, op.symbol());
                        self.expect(&rt, &Ty::Bool, loc, op.symbol());
                        Some(Ty::Bool)
                    }
                    BinOp::Add | BinOp::Sub | BinOp::Mul => {
                        if !lt.numeric() || !rt.numeric() {
                            self.err(StaticErrorKind::SortMismatch, loc, format!("{} needs numeric operands", op.symbol()));
                            return None;
                        }
                        Some(if lt == Ty::Money || rt == Ty::Money { Ty::Money } else { Ty::Nat })
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        if !lt.numeric() || !rt.numeric() {
                            self.err(StaticErrorKind::SortMismatch, loc, format!("{} needs numeric operands", op.symbol()));
                        }
                        Some(Ty::Bool)
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if !lt.compatible(&rt) {
                            self.err(StaticErrorKind::SortMismatch, loc, format!("cannot compare {lt:?} with {rt:?}"));
                        }
                        Some(Ty::Bool)
                    }
                    BinOp::In => {
                        let elem = match &rt {
                            Ty::Set(e) => Ty::Entity(Some(e.clone())),
                            Ty::Map(k, _) => Ty::of_sort(k),
                            _ => {
                                self.err(StaticErrorKind::SortMismatch, loc, "membership needs a set or map");
                                return Some(Ty::Bool);
                            }
                        };
                        if !lt.compatible(&elem) {
                            self.err(StaticErrorKind::SortMismatch, loc, "membership element has the wrong sort");
                        }
                        Some(Ty::Bool)
                    }
                }
            }
        }
    }

    fn expect(&mut self, found: &Ty, want: &Ty, loc: &str, what: &str) {
        if !found.compatible(want) {
            self.err(StaticErrorKind::SortMismatch, loc, format!("{what}: expected {want:?}, found {found:?}"));
        }
    }

    fn check_value(&mut self, e: &Expr, target: &Sort, scope: &[(String, Sort)], loc: &str) {
        if let Some(t) = self.infer(e, scope, loc, false) {
            if !t.fits(target) {
                self.err(StaticErrorKind::SortMismatch, loc, format!("value of sort {t:?} stored where {target} is declared"));
            }
        }
    }

    fn check_stmt(&mut self, stmt: &UpdateStmt, scope: &[(String, Sort)], loc: &str) {
        let target = stmt.target();
        let comp = match self.def.component(target) {
            Some(c) => c.clone(),
            None => {
                self.err(StaticErrorKind::UnknownStateRef, loc, format!("effect on undeclared component {target}"));
                return;
            }
        };
        if comp.is_derived() {
            self.err(StaticErrorKind::DerivedWriteError, loc, format!("effect writes derived component {target}"));
            return;
        }
        match (stmt, &comp.kind) {
            (UpdateStmt::Insert { elem, .. } | UpdateStmt::Remove { elem, .. }, ComponentKind::Set(e)) => {
                self.check_value(elem, &Sort::Entity(e.clone()), scope, loc)
            }
            (UpdateStmt::Put { key, value, .. }, ComponentKind::Map(ks, vs)) => {
                self.check_value(key, ks, scope, loc);
                self.check_value(value, vs, scope, loc);
            }
            (UpdateStmt::Drop { key, .. }, ComponentKind::Map(ks, _)) => self.check_value(key, ks, scope, loc),
            (UpdateStmt::Assign { value, .. }, ComponentKind::Scalar(s)) => self.check_value(value, s, scope, loc),
            (UpdateStmt::Clear { .. }, _) => {}
            _ => self.err(StaticErrorKind::KindMismatch, loc, format!("statement does not match the kind of {target}")),
        }
    }
}

/// Checks every structural and sort invariant of a concept. An empty result means valid.
pub fn validate_concept(def: &ConceptDef) -> Vec<StaticError> {
    let mut ck = Checker { def, errors: Vec::new() };
    let mut seen = BTreeSet::new();
    for c in &def.state {
        let loc = format!("{}.{}", def.name, c.name);
        if !seen.insert(c.name.as_str()) {
            ck.err(StaticErrorKind::DuplicateState, &loc, format!("state component {} declared twice", c.name));
        }
        match &c.kind {
            ComponentKind::Scalar(s) => ck.check_sort(s, &loc),
            ComponentKind::Set(e) => ck.check_sort(&Sort::Entity(e.clone()), &loc),
            ComponentKind::Map(k, v) => {
                ck.check_sort(k, &loc);
                ck.check_sort(v, &loc);
            }
        }
        if let Some(init) = &c.init {
            if c.is_derived() || init.to_value(&c.kind).is_none() {
                ck.err(StaticErrorKind::SortMismatch, &loc, "initial value does not fit the declared sort");
            }
        }
        if let Some(expr) = &c.derived {
            if let Some(t) = ck.infer(expr, &[], &loc, true) {
                let ok = match &c.kind {
                    ComponentKind::Scalar(s) => t.fits(s),
                    k => t == Ty::of_kind(k),
                };
                if !ok {
                    ck.err(StaticErrorKind::SortMismatch, &loc, "derivation does not produce the declared sort");
                }
            }
        }
    }
    let mut actions = BTreeSet::new();
    for a in &def.actions {
        let loc = format!("{}.{}", def.name, a.name);
        if !actions.insert(a.name.as_str()) {
            ck.err(StaticErrorKind::DuplicateAction, &loc, format!("action {} declared twice", a.name));
        }
        let mut params = BTreeSet::new();
        for p in &a.params {
            if !params.insert(p.name.as_str()) {
                ck.err(StaticErrorKind::DuplicateParam, &loc, format!("parameter {} declared twice", p.name));
            }
            ck.check_sort(&p.sort, &loc);
        }
        let scope: Vec<(String, Sort)> = a.params.iter().map(|p| (p.name.clone(), p.sort.clone())).collect();
        let pre_loc = format!("{loc}.requires");
        if let Some(t) = ck.infer(&a.precondition, &scope, &pre_loc, false) {
            ck.expect(&t, &Ty::Bool, &pre_loc, "precondition");
        }
        for (i, stmt) in a.effects.iter().enumerate() {
            ck.check_stmt(stmt, &scope, &format!("{loc}.effects[{i}]"));
        }
    }
    ck.errors
}
