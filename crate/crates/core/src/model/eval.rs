//! Expression evaluation over concept and application state.

use std::borrow::Cow;
use std::collections::BTreeSet;

use thiserror::Error;

use super::concept::{ConceptDef, ConceptState};
use super::expr::{BinOp, Expr, Literal, StatePath};
use super::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no entry for key {key} in {component}")]
    MissingKey { component: String, key: String },
    #[error("unknown state component {0}")]
    UnknownComponent(String),
    #[error("unbound variable {0}")]
    UnboundVar(String),
    #[error("Nat arithmetic went below zero")]
    NatUnderflow,
    #[error("integer overflow")]
    Overflow,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

/// Read access to component values. Derived components are computed on demand.
pub trait StateSource {
    fn component(&self, path: &StatePath) -> Result<Cow<'_, Value>, EvalError>;
}

/// Variable bindings: action parameters, sync pattern variables, sum variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    vars: Vec<(String, Value)>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.push(name, value);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, value: Value) {
        self.vars.push((name.into(), value));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (S, Value)>>(iter: T) -> Self {
        Bindings { vars: iter.into_iter().map(|(n, v)| (n.into(), v)).collect() }
    }
}

/// One concept's state seen through its definition, so derived components resolve.
pub struct ConceptView<'a> {
    pub def: &'a ConceptDef,
    pub state: &'a ConceptState,
}

impl<'a> ConceptView<'a> {
    pub fn new(def: &'a ConceptDef, state: &'a ConceptState) -> Self {
        ConceptView { def, state }
    }
}

impl StateSource for ConceptView<'_> {
    fn component(&self, path: &StatePath) -> Result<Cow<'_, Value>, EvalError> {
        if path.instance.is_some() {
            return Err(EvalError::UnknownComponent(path.to_string()));
        }
        component_of(self.def, self.state, &path.component, self)
    }
}

/// Shared lookup used by both concept and application views.
pub(crate) fn component_of<'s>(
    def: &ConceptDef,
    state: &'s ConceptState,
    name: &str,
    derive_src: &dyn StateSource,
) -> Result<Cow<'s, Value>, EvalError> {
    let comp = def
        .component(name)
        .ok_or_else(|| EvalError::UnknownComponent(format!("{}.{name}", def.name)))?;
    match &comp.derived {
        Some(expr) => {
            let v = eval(derive_src, &mut Bindings::new(), expr)?;
            Ok(Cow::Owned(v.coerce_to_kind(&comp.kind)))
        }
        None => state
            .get(name)
            .map(Cow::Borrowed)
            .ok_or_else(|| EvalError::UnknownComponent(format!("{}.{name}", def.name))),
    }
}

/// Evaluates `e` against one concept's state with the given parameter bindings.
pub fn eval_expr(
    def: &ConceptDef,
    state: &ConceptState,
    env: &Bindings,
    e: &Expr,
) -> Result<Value, EvalError> {
    eval(&ConceptView::new(def, state), &mut env.clone(), e)
}

/// Evaluates a Bool-sorted expression; anything else is a type error.
pub fn eval_bool(src: &dyn StateSource, env: &Bindings, e: &Expr) -> Result<bool, EvalError> {
    match eval(src, &mut env.clone(), e)? {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::TypeMismatch(format!("expected Bool, found {other}"))),
    }
}

/// Core evaluator. `env` is used as a scope stack for sum variables and restored on return.
pub fn eval(src: &dyn StateSource, env: &mut Bindings, e: &Expr) -> Result<Value, EvalError> {
    match e {
        Expr::Lit(lit) => Ok(match lit {
            Literal::Int(n) if *n >= 0 => Value::Nat(*n),
            Literal::Int(n) => Value::Money(*n),
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Text(s) => Value::Text(s.clone()),
            Literal::Entity(id) => Value::Entity(id.clone()),
            Literal::None => Value::Unset,
        }),
        Expr::Var(name) => env.get(name).cloned().ok_or_else(|| EvalError::UnboundVar(name.clone())),
        Expr::State { path, key } => {
            let whole = src.component(path)?;
            match key {
                None => Ok(whole.into_owned()),
                Some(k) => {
                    let k = eval(src, env, k)?;
                    lookup(&whole, &k, path)
                }
            }
        }
        Expr::Not(inner) => match eval(src, env, inner)? {
            Value::Bool(b) => Ok(Value::Bool(!b)),
            other => Err(EvalError::TypeMismatch(format!("not applied to {other}"))),
        },
        Expr::Card(inner) => match eval(src, env, inner)? {
            Value::Set(s) => Ok(Value::Nat(s.len() as i64)),
            Value::Map(m) => Ok(Value::Nat(m.len() as i64)),
            other => Err(EvalError::TypeMismatch(format!("cardinality of {other}"))),
        },
        Expr::Sum { var, over, body } => {
            let members: BTreeSet<Value> = match src.component(over)?.as_ref() {
                Value::Set(s) => s.clone(),
                other => {
                    return Err(EvalError::TypeMismatch(format!("sum over non-set {other}")))
                }
            };
            let mut total: Option<Value> = None;
            for m in members {
                env.push(var.clone(), m);
                let term = eval(src, env, body);
                env.pop();
                let term = term?;
                total = Some(match total {
                    None => term,
                    Some(acc) => arith(BinOp::Add, &acc, &term)?,
                });
            }
            Ok(total.unwrap_or(Value::Nat(0)))
        }
        Expr::Binary(op, l, r) => match op {
            BinOp::And => {
                if !truth(eval(src, env, l)?)? {
                    return Ok(Value::Bool(false));
                }
                Ok(Value::Bool(truth(eval(src, env, r)?)?))
            }
            BinOp::Or => {
                if truth(eval(src, env, l)?)? {
                    return Ok(Value::Bool(true));
                }
                Ok(Value::Bool(truth(eval(src, env, r)?)?))
            }
            _ => {
                let lv = eval(src, env, l)?;
                let rv = eval(src, env, r)?;
                binary(*op, &lv, &rv)
            }
        },
    }
}

fn truth(v: Value) -> Result<bool, EvalError> {
    v.as_bool()
        .ok_or_else(|| EvalError::TypeMismatch(format!("expected Bool, found {v}")))
}

fn lookup(whole: &Value, key: &Value, path: &StatePath) -> Result<Value, EvalError> {
    match whole {
        Value::Map(m) => m
            .get(key)
            .or_else(|| {
                // keys may be stored with a different numeric tag
                m.iter().find(|(k, _)| k.loose_eq(key)).map(|(_, v)| v)
            })
            .cloned()
            .ok_or_else(|| EvalError::MissingKey { component: path.to_string(), key: key.to_string() }),
        other => Err(EvalError::TypeMismatch(format!("{path} = {other} is not a map"))),
    }
}

fn binary(op: BinOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    match op {
        BinOp::Add | BinOp::Sub | BinOp::Mul => arith(op, l, r),
        BinOp::Eq => Ok(Value::Bool(l.loose_eq(r))),
        BinOp::Ne => Ok(Value::Bool(!l.loose_eq(r))),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let (a, b) = ints(l, r)?;
            Ok(Value::Bool(match op {
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Gt => a > b,
                _ => a >= b,
            }))
        }
        BinOp::In => match r {
            Value::Set(s) => Ok(Value::Bool(s.contains(l))),
            Value::Map(m) => Ok(Value::Bool(m.contains_key(l))),
            other => Err(EvalError::TypeMismatch(format!("membership in {other}"))),
        },
        BinOp::And | BinOp::Or => unreachable!("short-circuit operators handled by eval"),
    }
}

fn ints(l: &Value, r: &Value) -> Result<(i64, i64), EvalError> {
    match (l.as_int(), r.as_int()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(EvalError::TypeMismatch(format!("numeric operands expected, found {l} and {r}"))),
    }
}

fn arith(op: BinOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    let (a, b) = ints(l, r)?;
    let out = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        _ => a.checked_mul(b),
    }
    .ok_or(EvalError::Overflow)?;
    if matches!(l, Value::Money(_)) || matches!(r, Value::Money(_)) {
        Ok(Value::Money(out))
    } else if out < 0 {
        Err(EvalError::NatUnderflow)
    } else {
        Ok(Value::Nat(out))
    }
}
