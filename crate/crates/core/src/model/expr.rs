use std::collections::BTreeMap;

/// A literal inside an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Int(i64),
    Bool(bool),
    Text(String),
    /// `@id`
    Entity(String),
    /// `none`
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Mul,
}

impl BinOp {
    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

/// A component, optionally qualified by the instance (or concept) that owns it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatePath {
    pub instance: Option<String>,
    pub component: String,
}

impl StatePath {
    pub fn local(component: impl Into<String>) -> Self {
        StatePath { instance: None, component: component.into() }
    }

    pub fn qualified(instance: impl Into<String>, component: impl Into<String>) -> Self {
        StatePath { instance: Some(instance.into()), component: component.into() }
    }
}

impl std::fmt::Display for StatePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.instance {
            Some(i) => write!(f, "{i}.{}", self.component),
            None => f.write_str(&self.component),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(Literal),
    /// An action parameter, sync pattern variable, or sum-bound variable.
    Var(String),
    State { path: StatePath, key: Option<Box<Expr>> },
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `|S|`
    Card(Box<Expr>),
    /// `sum(k in S: body)`
    Sum { var: String, over: StatePath, body: Box<Expr> },
}

impl Expr {
    pub fn truth() -> Expr {
        Expr::Lit(Literal::Bool(true))
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Expr::Lit(Literal::Bool(true)))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Lit(Literal::Int(n))
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn state(component: impl Into<String>) -> Expr {
        Expr::State { path: StatePath::local(component), key: None }
    }

    pub fn lookup(component: impl Into<String>, key: Expr) -> Expr {
        Expr::State { path: StatePath::local(component), key: Some(Box::new(key)) }
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Visits every state path read by the expression, including sum domains.
    pub fn for_each_path(&self, f: &mut dyn FnMut(&StatePath)) {
        match self {
            Expr::Lit(_) | Expr::Var(_) => {}
            Expr::State { path, key } => {
                f(path);
                if let Some(k) = key {
                    k.for_each_path(f);
                }
            }
            Expr::Not(e) | Expr::Card(e) => e.for_each_path(f),
            Expr::Binary(_, l, r) => {
                l.for_each_path(f);
                r.for_each_path(f);
            }
            Expr::Sum { over, body, .. } => {
                f(over);
                body.for_each_path(f);
            }
        }
    }

    /// Renames instance qualifiers (e.g. concept names in catalog templates to instance names).
    /// Qualifiers absent from the map are kept.
    pub fn rename_instances(&self, map: &BTreeMap<String, String>) -> Expr {
        let rename = |p: &StatePath| StatePath {
            instance: p.instance.as_ref().map(|i| map.get(i).cloned().unwrap_or_else(|| i.clone())),
            component: p.component.clone(),
        };
        match self {
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::State { path, key } => Expr::State {
                path: rename(path),
                key: key.as_ref().map(|k| Box::new(k.rename_instances(map))),
            },
            Expr::Not(e) => Expr::Not(Box::new(e.rename_instances(map))),
            Expr::Card(e) => Expr::Card(Box::new(e.rename_instances(map))),
            Expr::Binary(op, l, r) => {
                Expr::bin(*op, l.rename_instances(map), r.rename_instances(map))
            }
            Expr::Sum { var, over, body } => Expr::Sum {
                var: var.clone(),
                over: rename(over),
                body: Box::new(body.rename_instances(map)),
            },
        }
    }
}
