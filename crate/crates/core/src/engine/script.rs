//! Action scripts for batch simulation.
//!
//! One call per line or `;`-separated: `user cart.add(a, 300)`. The instance may be omitted when
//! exactly one instance has the action. Arguments are typed by the action's parameter sorts.

use thiserror::Error;

use super::state::ActionCall;
use crate::lang::{tokenize, ParseError, Tok, Token};
use crate::model::{App, Role, Sort, Value};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error(transparent)]
    Lex(#[from] ParseError),
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {message}")]
    Resolve { line: usize, message: String },
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, t: &Token, what: &str) -> Result<T, ScriptError> {
        Err(ScriptError::Syntax {
            line: t.line,
            column: t.column,
            message: format!("expected {what}, found {}", t.tok.describe()),
        })
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ScriptError> {
        let t = self.next().clone();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line)),
            _ => self.fail(&t, what),
        }
    }

    fn eat(&mut self, sym: &'static str) -> bool {
        if self.peek().tok == Tok::Sym(sym) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &'static str) -> Result<(), ScriptError> {
        let t = self.peek().clone();
        if self.eat(sym) {
            Ok(())
        } else {
            self.fail(&t, &format!("`{sym}`"))
        }
    }
}

/// An argument as written, before its sort is known.
#[derive(Clone, Debug)]
enum RawArg {
    Int(i64),
    Text(String),
    Name(String),
}

fn arg(c: &mut Cursor<'_>) -> Result<RawArg, ScriptError> {
    let neg = c.eat("-");
    c.eat("@");
    let t = c.next().clone();
    match t.tok {
        Tok::Int(n) => Ok(RawArg::Int(if neg { -n } else { n })),
        Tok::Str(s) if !neg => Ok(RawArg::Text(s)),
        Tok::Ident(s) if !neg => Ok(RawArg::Name(s)),
        _ => c.fail(&t, "an argument"),
    }
}

fn typed(raw: &RawArg, sort: Option<&Sort>) -> Value {
    match (raw, sort) {
        (RawArg::Int(n), Some(Sort::Money)) => Value::Money(*n),
        (RawArg::Int(n), _) if *n < 0 => Value::Money(*n),
        (RawArg::Int(n), _) => Value::Nat(*n),
        (RawArg::Text(s), _) => Value::Text(s.clone()),
        (RawArg::Name(s), Some(Sort::Bool) | None) if s == "true" || s == "false" => Value::Bool(s == "true"),
        (RawArg::Name(s), _) if s == "none" => Value::Unset,
        (RawArg::Name(s), _) => Value::entity(s.as_str()),
    }
}

/// Parses a script against an app, resolving omitted instances and argument sorts.
pub fn parse_script(app: &App, src: &str) -> Result<Vec<ActionCall>, ScriptError> {
    let toks = tokenize(src)?;
    let mut c = Cursor { toks: &toks, pos: 0 };
    let mut out = Vec::new();
    loop {
        while c.eat(";") {}
        if c.peek().tok == Tok::Eof {
            return Ok(out);
        }
        let role_tok = c.peek().clone();
        let (role, line) = c.ident("`user` or `provider`")?;
        let role = match role.as_str() {
            "user" => Role::User,
            "provider" => Role::Provider,
            _ => return c.fail(&role_tok, "`user` or `provider`"),
        };
        let (first, _) = c.ident("an action")?;
        let (instance, action) = if c.eat(".") {
            let (a, _) = c.ident("an action")?;
            (Some(first), a)
        } else {
            (None, first)
        };
        let mut raw = Vec::new();
        if c.eat("(") && !c.eat(")") {
            loop {
                raw.push(arg(&mut c)?);
                if c.eat(")") {
                    break;
                }
                c.expect(",")?;
            }
        }
        let instance = match instance {
            Some(i) => i,
            None => {
                let owners: Vec<&str> = app
                    .instance_names()
                    .filter(|i| app.concept(i).is_some_and(|d| d.action(&action).is_some()))
                    .collect();
                match owners.as_slice() {
                    [one] => one.to_string(),
                    [] => return Err(ScriptError::Resolve { line, message: format!("no instance has action {action}") }),
                    many => {
                        return Err(ScriptError::Resolve {
                            line,
                            message: format!("action {action} is ambiguous between {}", many.join(", ")),
                        })
                    }
                }
            }
        };
        let sorts: Vec<Sort> = app
            .concept(&instance)
            .and_then(|d| d.action(&action))
            .map(|a| a.param_sorts().into_iter().cloned().collect())
            .unwrap_or_default();
        let args = raw.iter().enumerate().map(|(i, r)| typed(r, sorts.get(i))).collect();
        out.push(ActionCall::new(&instance, &action, args, role));
    }
}
