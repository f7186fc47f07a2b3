use std::collections::BTreeMap;

use super::error::ParseError;
use super::lexer::{tokenize, Tok, Token};
use crate::catalog::{EntryFile, Expectation, Scenario, VariantDecl};
use crate::conformance::BenefitAnnotation;
use crate::engine::EntityDomains;
use crate::model::{
    ActionDef, AppModel, ArgPattern, Beneficiary, BinOp, Category, ComponentKind, ConceptDef, Dyad, Expr,
    Initiator, InstanceDecl, Literal, Param, Reaction, Sort, StateComponent, StatePath, SyncRule, SyncTrigger,
    UpdateStmt, ValueLit,
};
use crate::ui::{
    CallTemplate, ControlScope, ElementKind, MappingStandard, Milli, Screen, UiBinding, UiElement, UiModel, UiRef,
};

/// Words that can never name a component, parameter, or variable.
pub const RESERVED: [&str; 9] = ["and", "or", "not", "in", "sum", "none", "true", "false", "_"];

/// How bare names inside an expression resolve.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Names {
    /// Inside a concept: bound names are variables, anything else is local state.
    Concept,
    /// Syncs, UI, and catalog rules: bare names are variables; state is always qualified.
    External,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: Names,
    bound: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub(crate) fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, names: Names::Concept, bound: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_n(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.here();
        let exp: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        let msg = format!("unexpected {}", t.tok.describe());
        Err(ParseError::new(t.line, t.column, msg, exp))
    }

    fn fail_at<T>(&self, t: &Token, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(t.line, t.column, msg, vec![]))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(&[&format!("`{s}`")])
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(&[&format!("`{kw}`")])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(&[what]),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(&["string literal"]),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => self.err(&["integer"]),
        }
    }

    fn nat(&mut self) -> PResult<u32> {
        let t = self.here().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                u32::try_from(n).or_else(|_| self.fail_at(&t, format!("{n} is out of range")))
            }
            _ => self.err(&["natural number"]),
        }
    }

    fn milli(&mut self) -> PResult<Milli> {
        let t = self.here().clone();
        let text = match &t.tok {
            Tok::Int(n) => n.to_string(),
            Tok::Decimal(d) => d.clone(),
            _ => return self.err(&["number"]),
        };
        self.bump();
        text.parse::<Milli>().or_else(|e| self.fail_at(&t, e))
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub(crate) fn finish(&self) -> PResult<()> {
        self.expect_eof()
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err(&["end of file"])
        }
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut l = self.and_expr()?;
        while self.eat_kw("or") {
            let r = self.and_expr()?;
            l = Expr::bin(BinOp::Or, l, r);
        }
        Ok(l)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut l = self.not_expr()?;
        while self.eat_kw("and") {
            let r = self.not_expr()?;
            l = Expr::bin(BinOp::And, l, r);
        }
        Ok(l)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            Ok(Expr::Not(Box::new(self.not_expr()?)))
        } else {
            self.cmp_expr()
        }
    }

    fn cmp_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Ident(s) if s == "in" => BinOp::In,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let mut l = self.add_expr()?;
        while let Some(op) = self.cmp_op() {
            self.bump();
            let r = self.add_expr()?;
            l = Expr::bin(op, l, r);
        }
        Ok(l)
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut l = self.mul_expr()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Sub
            } else {
                break;
            };
            self.bump();
            let r = self.mul_expr()?;
            l = Expr::bin(op, l, r);
        }
        Ok(l)
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut l = self.primary()?;
        while self.eat_sym("*") {
            let r = self.primary()?;
            l = Expr::bin(BinOp::Mul, l, r);
        }
        Ok(l)
    }

    fn key_suffix(&mut self) -> PResult<Option<Box<Expr>>> {
        if self.eat_sym("[") {
            let k = self.expr()?;
            self.expect_sym("]")?;
            Ok(Some(Box::new(k)))
        } else {
            Ok(None)
        }
    }

    fn state_path(&mut self) -> PResult<StatePath> {
        let first = self.ident("state component")?;
        if self.eat_sym(".") {
            let comp = self.ident("state component")?;
            Ok(StatePath::qualified(first, comp))
        } else if self.names == Names::External {
            self.err(&["`.`"])
        } else {
            Ok(StatePath::local(first))
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        const EXPECTED: [&str; 5] = ["identifier", "literal", "`(`", "`|`", "`not`"];
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Lit(Literal::Int(n)))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Lit(Literal::Text(s)))
            }
            Tok::Sym("@") => {
                self.bump();
                Ok(Expr::Lit(Literal::Entity(self.ident("entity id")?)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("|") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym("|")?;
                Ok(Expr::Card(Box::new(e)))
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::Lit(Literal::Bool(w == "true")))
                }
                "none" => {
                    self.bump();
                    Ok(Expr::Lit(Literal::None))
                }
                "sum" => {
                    self.bump();
                    self.expect_sym("(")?;
                    let var = self.ident("variable")?;
                    self.expect_kw("in")?;
                    let over = self.state_path()?;
                    self.expect_sym(":")?;
                    self.bound.push(var.clone());
                    let body = self.expr();
                    self.bound.pop();
                    let body = body?;
                    self.expect_sym(")")?;
                    Ok(Expr::Sum { var, over, body: Box::new(body) })
                }
                _ if RESERVED.contains(&w.as_str()) => self.err(&EXPECTED),
                _ => {
                    self.bump();
                    if matches!(self.peek(), Tok::Sym(".")) && matches!(self.peek_n(1), Tok::Ident(_)) {
                        self.bump();
                        let comp = self.ident("state component")?;
                        let key = self.key_suffix()?;
                        return Ok(Expr::State { path: StatePath::qualified(w, comp), key });
                    }
                    let is_var = match self.names {
                        Names::External => true,
                        Names::Concept => self.bound.contains(&w),
                    };
                    if is_var {
                        Ok(Expr::Var(w))
                    } else {
                        let key = self.key_suffix()?;
                        Ok(Expr::State { path: StatePath::local(w), key })
                    }
                }
            },
            _ => self.err(&EXPECTED),
        }
    }

    fn external_expr(&mut self) -> PResult<Expr> {
        let saved = self.names;
        self.names = Names::External;
        let e = self.expr();
        self.names = saved;
        e
    }

    // ---- shared pieces ----

    fn sort(&mut self) -> PResult<Sort> {
        Ok(Sort::from_name(&self.ident("sort")?))
    }

    /// Value literals: bare identifiers (or `@id`) are entities.
    fn value_lit(&mut self) -> PResult<ValueLit> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Sym("-") => Ok(ValueLit::Int(self.int()?)),
            Tok::Str(s) => {
                self.bump();
                Ok(ValueLit::Text(s))
            }
            Tok::Sym("@") => {
                self.bump();
                Ok(ValueLit::Entity(self.ident("entity id")?))
            }
            Tok::Sym("{") => {
                self.bump();
                if self.eat_sym("}") {
                    return Ok(ValueLit::Empty);
                }
                let first = self.value_lit()?;
                if self.eat_sym(":") {
                    let v = self.value_lit()?;
                    let mut entries = vec![(first, v)];
                    while self.eat_sym(",") {
                        let k = self.value_lit()?;
                        self.expect_sym(":")?;
                        entries.push((k, self.value_lit()?));
                    }
                    self.expect_sym("}")?;
                    Ok(ValueLit::Map(entries))
                } else {
                    let mut items = vec![first];
                    while self.eat_sym(",") {
                        items.push(self.value_lit()?);
                    }
                    self.expect_sym("}")?;
                    Ok(ValueLit::Set(items))
                }
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(ValueLit::Bool(w == "true"))
            }
            Tok::Ident(w) if w == "none" => {
                self.bump();
                Ok(ValueLit::None)
            }
            Tok::Ident(_) => Ok(ValueLit::Entity(self.ident("entity id")?)),
            _ => self.err(&["value literal"]),
        }
    }

    fn call_head(&mut self) -> PResult<(String, String)> {
        let inst = self.ident("instance name")?;
        self.expect_sym(".")?;
        let act = self.ident("action name")?;
        Ok((inst, act))
    }

    fn comma_list<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            if !self.eat_sym(",") {
                return self.err(&["`,`", &format!("`{close}`")]);
            }
        }
    }

    fn sync_rule(&mut self) -> PResult<SyncRule> {
        self.expect_kw("sync")?;
        let name = self.ident("sync name")?;
        self.expect_kw("when")?;
        let (instance, action) = self.call_head()?;
        self.expect_sym("(")?;
        let pattern = self.comma_list(")", |p| {
            if p.is_kw("_") {
                p.bump();
                return Ok(ArgPattern::Any);
            }
            match p.peek() {
                Tok::Ident(w) if !matches!(w.as_str(), "true" | "false" | "none") => {
                    Ok(ArgPattern::Var(p.ident("pattern variable")?))
                }
                _ => Ok(ArgPattern::Lit(p.value_lit()?)),
            }
        })?;
        self.expect_kw("then")?;
        let mut reactions = Vec::new();
        loop {
            let (inst, act) = self.call_head()?;
            self.expect_sym("(")?;
            let args = self.comma_list(")", |p| p.external_expr())?;
            reactions.push(Reaction { instance: inst, action: act, args });
            let more = matches!(self.peek(), Tok::Ident(_))
                && matches!(self.peek_n(1), Tok::Sym("."))
                && matches!(self.peek_n(2), Tok::Ident(_))
                && matches!(self.peek_n(3), Tok::Sym("("));
            if !more {
                break;
            }
        }
        Ok(SyncRule { name, trigger: SyncTrigger { instance, action, pattern }, reactions })
    }

    fn domain_block(&mut self) -> PResult<EntityDomains> {
        self.expect_kw("domain")?;
        self.expect_sym("{")?;
        let mut d = EntityDomains::default();
        while !self.eat_sym("}") {
            let t = self.here().clone();
            let sort = self.ident("sort name")?;
            self.expect_sym("=")?;
            self.expect_sym("{")?;
            match sort.as_str() {
                "Nat" => d.nat = Some(self.comma_list("}", |p| p.int())?),
                "Money" => d.money = Some(self.comma_list("}", |p| p.int())?),
                "Text" => d.text = Some(self.comma_list("}", |p| p.string())?),
                "Bool" => return self.fail_at(&t, "Bool has a fixed domain"),
                _ => {
                    let ids = self.comma_list("}", |p| p.ident("entity id"))?;
                    if d.entities.insert(sort.clone(), ids).is_some() {
                        return self.fail_at(&t, format!("domain for {sort} given twice"));
                    }
                }
            }
        }
        Ok(d)
    }

    // ---- concept ----

    pub(crate) fn concept(&mut self) -> PResult<ConceptDef> {
        self.names = Names::Concept;
        self.expect_kw("concept")?;
        let name = self.ident("concept name")?;
        let type_params = if self.eat_sym("[") { self.comma_list("]", |p| p.ident("type parameter"))? } else { vec![] };
        self.expect_kw("purpose")?;
        let purpose = self.string()?;
        let mut state = Vec::new();
        if self.eat_kw("state") {
            while self.is_kw("derived") || matches!(self.peek_n(1), Tok::Sym(":")) {
                state.push(self.state_decl()?);
            }
        }
        let mut actions = Vec::new();
        if self.eat_kw("actions") {
            while matches!(self.peek(), Tok::Ident(_)) {
                actions.push(self.action_decl()?);
            }
        }
        self.expect_eof()?;
        Ok(ConceptDef { name, type_params, purpose, state, actions })
    }

    fn state_decl(&mut self) -> PResult<StateComponent> {
        if self.eat_kw("derived") {
            let name = self.ident("component name")?;
            self.expect_sym(":")?;
            let sort = self.sort()?;
            self.expect_sym("=")?;
            let e = self.expr()?;
            return Ok(StateComponent { name, kind: ComponentKind::Scalar(sort), init: None, derived: Some(e) });
        }
        let name = self.ident("component name")?;
        self.expect_sym(":")?;
        let kind = if self.eat_kw("one") {
            ComponentKind::Scalar(self.sort()?)
        } else if self.eat_kw("set") {
            ComponentKind::Set(self.ident("entity sort")?)
        } else {
            let k = self.sort()?;
            self.expect_sym("->")?;
            ComponentKind::Map(k, self.sort()?)
        };
        let init = if self.eat_sym("=") { Some(self.value_lit()?) } else { None };
        Ok(StateComponent { name, kind, init, derived: None })
    }

    fn action_decl(&mut self) -> PResult<ActionDef> {
        let name = self.ident("action name")?;
        self.expect_sym("(")?;
        let params = self.comma_list(")", |p| {
            let name = p.ident("parameter name")?;
            p.expect_sym(":")?;
            Ok(Param { name, sort: p.sort()? })
        })?;
        self.expect_kw("by")?;
        let initiator = if self.eat_kw("user") {
            Initiator::User
        } else if self.eat_kw("provider") {
            Initiator::Provider
        } else if self.eat_kw("either") {
            Initiator::Either
        } else {
            return self.err(&["`user`", "`provider`", "`either`"]);
        };
        self.bound = params.iter().map(|p| p.name.clone()).collect();
        let result = self.action_body();
        self.bound.clear();
        let (precondition, effects) = result?;
        Ok(ActionDef { name, params, initiator, precondition, effects })
    }

    fn action_body(&mut self) -> PResult<(Expr, Vec<UpdateStmt>)> {
        let pre = if self.eat_kw("requires") { self.expr()? } else { Expr::truth() };
        let mut effects = Vec::new();
        if self.eat_kw("effects") {
            loop {
                effects.push(self.stmt()?);
                if !self.eat_sym(";") {
                    break;
                }
            }
        }
        Ok((pre, effects))
    }

    fn stmt(&mut self) -> PResult<UpdateStmt> {
        if self.is_kw("clear") && matches!(self.peek_n(1), Tok::Ident(_)) {
            self.bump();
            return Ok(UpdateStmt::Clear { target: self.ident("component name")? });
        }
        if self.is_kw("drop") && matches!(self.peek_n(1), Tok::Ident(_)) {
            self.bump();
            let map = self.ident("component name")?;
            self.expect_sym("[")?;
            let key = self.expr()?;
            self.expect_sym("]")?;
            return Ok(UpdateStmt::Drop { map, key });
        }
        let target = self.ident("component name")?;
        if self.eat_sym("+=") {
            Ok(UpdateStmt::Insert { set: target, elem: self.expr()? })
        } else if self.eat_sym("-=") {
            Ok(UpdateStmt::Remove { set: target, elem: self.expr()? })
        } else if self.eat_sym(":=") {
            Ok(UpdateStmt::Assign { target, value: self.expr()? })
        } else if self.eat_sym("[") {
            let key = self.expr()?;
            self.expect_sym("]")?;
            self.expect_sym(":=")?;
            Ok(UpdateStmt::Put { map: target, key, value: self.expr()? })
        } else {
            self.err(&["`+=`", "`-=`", "`:=`", "`[`"])
        }
    }

    // ---- app ----

    pub(crate) fn app(&mut self) -> PResult<AppModel> {
        self.names = Names::External;
        self.expect_kw("app")?;
        let name = self.ident("app name")?;
        let mut uses = Vec::new();
        while self.eat_kw("use") {
            uses.push(self.string()?);
        }
        let mut instances = Vec::new();
        while self.eat_kw("instance") {
            let name = self.ident("instance name")?;
            self.expect_sym(":")?;
            let concept = self.ident("concept name")?;
            let implements = if self.eat_kw("implements") { Some(self.ident("concept name")?) } else { None };
            let mut init = Vec::new();
            if self.eat_kw("init") {
                self.expect_sym("{")?;
                while !self.eat_sym("}") {
                    let comp = self.ident("component name")?;
                    self.expect_sym("=")?;
                    init.push((comp, self.value_lit()?));
                }
            }
            instances.push(InstanceDecl { name, concept, implements, init });
        }
        let mut syncs = Vec::new();
        while self.is_kw("sync") {
            syncs.push(self.sync_rule()?);
        }
        self.expect_eof()?;
        Ok(AppModel { name, uses, instances, syncs })
    }

    // ---- ui ----

    pub(crate) fn ui(&mut self) -> PResult<UiModel> {
        self.names = Names::External;
        let name = if self.eat_kw("ui") { Some(self.ident("ui name")?) } else { None };
        let mut screens = Vec::new();
        let mut positions: BTreeMap<String, Token> = BTreeMap::new();
        while self.eat_kw("screen") {
            let sname = self.ident("screen name")?;
            self.expect_sym("{")?;
            let mut elements = Vec::new();
            while !self.eat_sym("}") {
                self.expect_kw("element")?;
                let t = self.here().clone();
                let el = self.element(&sname)?;
                if positions.insert(el.id.clone(), t.clone()).is_some() {
                    return self.fail_at(&t, format!("duplicate element id {}", el.id));
                }
                elements.push(el);
            }
            screens.push(Screen { name: sname, elements });
        }
        self.expect_eof()?;
        let ui = UiModel { name, screens };
        for el in ui.elements() {
            if let Some(p) = &el.paired {
                let back = ui.element(p).and_then(|o| o.paired.as_deref());
                if back != Some(el.id.as_str()) {
                    return self.fail_at(&positions[&el.id], format!("{} is paired with {p}, which does not pair back", el.id));
                }
            }
        }
        Ok(ui)
    }

    fn ui_ref(&mut self) -> PResult<UiRef> {
        let instance = self.ident("instance name")?;
        self.expect_sym(".")?;
        let component = self.ident("component name")?;
        let key = if self.eat_sym("[") {
            let k = self.value_lit()?;
            self.expect_sym("]")?;
            Some(k)
        } else {
            None
        };
        Ok(UiRef { instance, component, key })
    }

    fn element(&mut self, screen: &str) -> PResult<UiElement> {
        let id = self.ident("element id")?;
        self.expect_sym(":")?;
        let kind = match self.peek() {
            Tok::Ident(k) => match ElementKind::from_keyword(k) {
                Some(k) => {
                    self.bump();
                    k
                }
                None => return self.err(&["`Button`", "`Label`", "`Icon`", "`Field`", "`Checkbox`"]),
            },
            _ => return self.err(&["element kind"]),
        };
        self.expect_kw("label")?;
        let label = self.string()?;
        let binding = if self.eat_kw("triggers") {
            let (instance, action) = self.call_head()?;
            self.expect_sym("(")?;
            let args = self.comma_list(")", |p| {
                if p.eat_kw("_") {
                    Ok(ArgPattern::Any)
                } else {
                    Ok(ArgPattern::Lit(p.value_lit()?))
                }
            })?;
            let default_on = if self.eat_kw("default") {
                self.expect_kw("on")?;
                true
            } else {
                false
            };
            let enabled_when = if self.eat_kw("enabled") {
                self.expect_kw("when")?;
                Some(self.external_expr()?)
            } else {
                None
            };
            UiBinding::Triggers { call: CallTemplate { instance, action, args }, default_on, enabled_when }
        } else if self.eat_kw("displays") {
            UiBinding::Displays(self.ui_ref()?)
        } else if self.eat_kw("claims") {
            let claimed = self.ui_ref()?;
            self.expect_kw("shows")?;
            UiBinding::Claims { claimed, shown: self.external_expr()? }
        } else if self.eat_kw("static") {
            UiBinding::Static
        } else {
            return self.err(&["`triggers`", "`displays`", "`claims`", "`static`"]);
        };
        self.expect_kw("prominence")?;
        let t = self.here().clone();
        let prominence = self.milli()?;
        if prominence > Milli::ONE {
            return self.fail_at(&t, "prominence must lie in [0, 1]");
        }
        self.expect_kw("steps")?;
        let steps = self.nat()?;
        let style = if self.eat_kw("style") { Some(self.string()?) } else { None };
        let convention = if self.eat_kw("convention") { Some(self.string()?) } else { None };
        let paired = if self.eat_kw("paired") { Some(self.ident("element id")?) } else { None };
        let visible = !self.eat_kw("hidden");
        Ok(UiElement {
            id,
            screen: screen.to_string(),
            kind,
            label,
            style,
            prominence,
            steps,
            visible,
            binding,
            convention,
            paired,
        })
    }

    // ---- catalog entry ----

    pub(crate) fn entry(&mut self) -> PResult<EntryFile> {
        self.names = Names::External;
        self.expect_kw("entry")?;
        let name = self.ident("entry name")?;
        self.expect_kw("concept")?;
        let concept = self.string()?;
        self.expect_kw("standard")?;
        self.expect_kw("app")?;
        let standard_app = self.string()?;
        let standard_ui = if self.eat_kw("ui") { Some(self.string()?) } else { None };
        let domain = if self.is_kw("domain") { self.domain_block()? } else { EntityDomains::default() };
        let mut syncs = Vec::new();
        while self.is_kw("sync") {
            syncs.push(self.sync_rule()?);
        }
        let mut independent = Vec::new();
        while self.eat_kw("independent") {
            independent.push(self.ident("action name")?);
        }
        let mut mapping = Vec::new();
        if self.eat_kw("mapping") {
            self.expect_sym("{")?;
            while !self.eat_sym("}") {
                mapping.push(self.mapping_rule()?);
            }
        }
        let mut variants = Vec::new();
        while self.eat_kw("variant") {
            let name = self.ident("variant name")?;
            let app = self.string()?;
            let ui = if self.eat_kw("ui") { Some(self.string()?) } else { None };
            let compatible = if self.eat_kw("compatible") {
                true
            } else if self.eat_kw("conflicting") {
                false
            } else {
                return self.err(&["`compatible`", "`conflicting`"]);
            };
            variants.push(VariantDecl { name, app, ui, compatible });
        }
        self.expect_eof()?;
        Ok(EntryFile { name, concept, standard_app, standard_ui, domain, syncs, independent, mapping, variants })
    }

    fn mapping_rule(&mut self) -> PResult<MappingStandard> {
        if self.eat_kw("display") {
            Ok(MappingStandard::RequireDisplay { state: self.ident("component name")? })
        } else if self.eat_kw("control") {
            let action = self.ident("action name")?;
            let scope = if self.eat_kw("per") {
                self.expect_kw("item")?;
                ControlScope::PerItem
            } else {
                ControlScope::Global
            };
            Ok(MappingStandard::RequireControl { action, scope })
        } else if self.eat_kw("label") {
            let label = self.string()?;
            self.expect_kw("reserved")?;
            self.expect_kw("for")?;
            Ok(MappingStandard::LabelReservation { label, state: self.ident("component name")? })
        } else if self.eat_kw("guard") {
            let action = self.ident("action name")?;
            self.expect_kw("when")?;
            Ok(MappingStandard::GuardedControl { action, guard: self.external_expr()? })
        } else if self.eat_kw("prominence") {
            let first = self.ident("action name")?;
            let second = self.ident("action name")?;
            Ok(MappingStandard::EqualProminence { first, second })
        } else if self.eat_kw("reach") {
            let first = self.ident("action name")?;
            self.expect_kw("then")?;
            let second = self.ident("action name")?;
            let max_ratio = if self.eat_kw("ratio") { Some(self.milli()?) } else { None };
            Ok(MappingStandard::ReachParity { first, second, max_ratio })
        } else if self.eat_kw("consistent") {
            Ok(MappingStandard::ConsistencyGroup { subject: self.ident("member name")? })
        } else {
            self.err(&["`display`", "`control`", "`label`", "`guard`", "`prominence`", "`reach`", "`consistent`", "`}`"])
        }
    }

    // ---- scenario ----

    fn subject(&mut self) -> PResult<String> {
        let mut s = self.ident("subject")?;
        loop {
            if self.eat_sym(".") {
                s.push('.');
            } else if self.eat_sym("~") {
                s.push('~');
            } else {
                return Ok(s);
            }
            s.push_str(&self.ident("subject")?);
        }
    }

    fn category(&mut self) -> PResult<Category> {
        let t = self.here().clone();
        let mut text = self.ident("deviation category")?;
        if self.eat_sym("(") {
            let inner = self.ident("mapping principle")?;
            self.expect_sym(")")?;
            text = format!("{text}({inner})");
        }
        text.parse::<Category>().or_else(|e| self.fail_at(&t, e))
    }

    fn beneficiary(&mut self) -> PResult<Beneficiary> {
        for b in [Beneficiary::Provider, Beneficiary::User, Beneficiary::Neutral] {
            if self.eat_kw(b.keyword()) {
                return Ok(b);
            }
        }
        self.err(&["`provider`", "`user`", "`neutral`"])
    }

    pub(crate) fn scenario(&mut self) -> PResult<Scenario> {
        self.names = Names::External;
        self.expect_kw("scenario")?;
        let name = self.ident("scenario name")?;
        self.expect_sym("{")?;
        self.expect_kw("standard")?;
        let standard = self.ident("standard name")?;
        self.expect_kw("app")?;
        let app = self.string()?;
        let ui = if self.eat_kw("ui") { Some(self.string()?) } else { None };
        let domain = if self.is_kw("domain") { Some(self.domain_block()?) } else { None };
        self.expect_kw("benefit")?;
        let default = self.beneficiary()?;
        let mut overrides = Vec::new();
        while self.eat_kw("override") {
            let s = self.subject()?;
            self.expect_sym("=")?;
            overrides.push((s, self.beneficiary()?));
        }
        self.expect_kw("expect")?;
        let mut expected = Vec::new();
        while !self.is_kw("dark") {
            let category = self.category()?;
            self.expect_kw("on")?;
            let subject = self.subject()?;
            self.expect_kw("dyad")?;
            let t = self.here().clone();
            let kw = self.ident("`observed` or `implemented`")?;
            let dyad = match Dyad::from_keyword(&kw) {
                Some(d) => d,
                None => return self.fail_at(&t, format!("unknown dyad {kw}")),
            };
            expected.push(Expectation { category, subject, dyad });
        }
        self.expect_kw("dark")?;
        let expected_dark = if self.eat_kw("true") {
            true
        } else if self.eat_kw("false") {
            false
        } else {
            return self.err(&["`true`", "`false`"]);
        };
        self.expect_sym("}")?;
        self.expect_eof()?;
        Ok(Scenario {
            name,
            standard,
            app,
            ui,
            domain,
            benefit: BenefitAnnotation { default, overrides },
            expected,
            expected_dark,
        })
    }
}
