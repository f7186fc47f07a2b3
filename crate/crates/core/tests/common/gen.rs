//! Random concept source text for round-trip testing.
//!
//! Names come from disjoint prefixed pools, so no identifier collides with a keyword and no
//! parameter shadows a state component.

use rand::seq::SliceRandom;
use rand::Rng;

const SORTS: [&str; 7] = ["Nat", "Money", "Bool", "Text", "Item", "User", "Seat"];
const ENTITIES: [&str; 3] = ["Item", "User", "Seat"];

struct Ctx {
    state: Vec<String>,
    vars: Vec<String>,
    sums: usize,
}

pub fn concept<R: Rng>(rng: &mut R) -> String {
    let mut out = String::new();
    let name = format!("C{}", rng.gen_range(0..1000));
    out.push_str(&format!("concept {name}"));
    if rng.gen_bool(0.7) {
        let n = rng.gen_range(1..=3);
        out.push_str(&format!(" [{}]", ENTITIES[..n].join(", ")));
    }
    out.push_str(&format!("\npurpose \"{}\"\n", purpose(rng)));

    let n_state = rng.gen_range(0..=5);
    let mut ctx = Ctx { state: (0..n_state).map(|i| format!("s{i}")).collect(), vars: vec![], sums: 0 };
    if n_state > 0 {
        out.push_str("state\n");
        for s in ctx.state.clone() {
            out.push_str("  ");
            match rng.gen_range(0..4) {
                0 => {
                    out.push_str(&format!("{s}: one {}", SORTS.choose(rng).unwrap()));
                    if rng.gen_bool(0.3) {
                        out.push_str(&format!(" = {}", rng.gen_range(0..50)));
                    }
                }
                1 => out.push_str(&format!("{s}: set {}", ENTITIES.choose(rng).unwrap())),
                2 => out.push_str(&format!("{s}: {} -> {}", ENTITIES.choose(rng).unwrap(), SORTS.choose(rng).unwrap())),
                _ => {
                    let body = expr(rng, &mut ctx, 2);
                    out.push_str(&format!("derived {s}: {} = {body}", SORTS.choose(rng).unwrap()));
                }
            }
            out.push('\n');
        }
    }

    let n_act = rng.gen_range(0..=4);
    if n_act > 0 {
        out.push_str("actions\n");
        for a in 0..n_act {
            let params: Vec<String> = (0..rng.gen_range(0..=3)).map(|i| format!("p{i}")).collect();
            let decl: Vec<String> =
                params.iter().map(|p| format!("{p}: {}", SORTS.choose(rng).unwrap())).collect();
            let by = ["user", "provider", "either"].choose(rng).unwrap();
            out.push_str(&format!("  act{a}({}) by {by}\n", decl.join(", ")));
            ctx.vars = params;
            if rng.gen_bool(0.7) {
                out.push_str(&format!("    requires {}\n", expr(rng, &mut ctx, 3)));
            }
            if !ctx.state.is_empty() && rng.gen_bool(0.8) {
                let stmts: Vec<String> = (0..rng.gen_range(1..=3)).map(|_| stmt(rng, &mut ctx)).collect();
                out.push_str(&format!("    effects {}\n", stmts.join("; ")));
            }
            ctx.vars.clear();
        }
    }
    out
}

fn purpose<R: Rng>(rng: &mut R) -> String {
    let words = ["track", "items", "for", "later", "with", "a", "cart", "quietly"];
    (0..rng.gen_range(1..6)).map(|_| *words.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn stmt<R: Rng>(rng: &mut R, ctx: &mut Ctx) -> String {
    let target = ctx.state.choose(rng).unwrap().clone();
    match rng.gen_range(0..6) {
        0 => format!("{target} := {}", expr(rng, ctx, 2)),
        1 => format!("{target} += {}", expr(rng, ctx, 1)),
        2 => format!("{target} -= {}", expr(rng, ctx, 1)),
        3 => format!("{target}[{}] := {}", expr(rng, ctx, 1), expr(rng, ctx, 2)),
        4 => format!("drop {target}[{}]", expr(rng, ctx, 1)),
        _ => format!("clear {target}"),
    }
}

fn atom<R: Rng>(rng: &mut R, ctx: &mut Ctx) -> String {
    loop {
        match rng.gen_range(0..9) {
            0 => return rng.gen_range(0..1000).to_string(),
            1 => return format!("\"{}\"", ["", "hi", "a b", "x\\\"y"].choose(rng).unwrap()),
            2 => return format!("@{}", ["a", "b", "u1"].choose(rng).unwrap()),
            3 => return ["true", "false"].choose(rng).unwrap().to_string(),
            4 => return "none".to_string(),
            5 if !ctx.vars.is_empty() => return ctx.vars.choose(rng).unwrap().clone(),
            6 if !ctx.state.is_empty() => return ctx.state.choose(rng).unwrap().clone(),
            7 if !ctx.state.is_empty() => {
                let s = ctx.state.choose(rng).unwrap().clone();
                return format!("{s}[{}]", atom(rng, ctx));
            }
            8 if !ctx.state.is_empty() => return format!("|{}|", ctx.state.choose(rng).unwrap()),
            _ => {}
        }
    }
}

fn expr<R: Rng>(rng: &mut R, ctx: &mut Ctx, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(rng, ctx);
    }
    match rng.gen_range(0..10) {
        0 => format!("(not {})", expr(rng, ctx, depth - 1)),
        1 => format!("({})", expr(rng, ctx, depth - 1)),
        2 if !ctx.state.is_empty() => {
            let v = format!("k{}", ctx.sums);
            ctx.sums += 1;
            let over = ctx.state.choose(rng).unwrap().clone();
            ctx.vars.push(v.clone());
            let body = expr(rng, ctx, depth - 1);
            ctx.vars.pop();
            format!("sum({v} in {over}: {body})")
        }
        _ => {
            let op = ["and", "or", "=", "!=", "<", "<=", ">", ">=", "in", "+", "-", "*"].choose(rng).unwrap();
            format!("{} {op} {}", expr(rng, ctx, depth - 1), expr(rng, ctx, depth - 1))
        }
    }
}

/// A random expression over the given local state names.
pub fn expression<R: Rng>(rng: &mut R, state: &[&str], depth: u32) -> String {
    let mut ctx = Ctx { state: state.iter().map(|s| s.to_string()).collect(), vars: vec![], sums: 0 };
    expr(rng, &mut ctx, depth)
}
