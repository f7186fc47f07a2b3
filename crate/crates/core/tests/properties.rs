//! Randomized properties of evaluation, execution, printing, and conformance.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use conceptkit::conformance::{check, trace_inclusion, BenefitAnnotation};
use conceptkit::engine::{ActionCall, AppState, AppView, Engine, TraceOptions};
use conceptkit::lang::{parse_concept, parse_expr, print_concept};
use conceptkit::ui::{check_faithfulness, CheckConfig, ConventionRegistry, MappingContext, Milli};
use conceptkit::{
    eval, App, Beneficiary, Bindings, Category, ConceptView, DarkFinding, Deviation, Dyad, Principle, Role, Value,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CART: &str = "catalog/shoppingcart.concept";

/// Text edits to the standard cart, each a plausible implementation slip.
const MUTATIONS: [(&str, &str); 6] = [
    ("quantity[i] := 1", "quantity[i] := 2"),
    ("drop quantity[i]; drop price[i]", "drop quantity[i]"),
    ("q >= 1", "q >= 2"),
    ("clear items; clear quantity; clear price", "clear items; clear quantity"),
    ("requires not (i in items)\n", "requires not (i in items) and |items| < 1\n"),
    ("changePrice(i: Item, p: Money) by provider", "changePrice(i: Item, p: Money) by either"),
];

fn mutated_cart(mask: &[bool]) -> String {
    let mut src = common::shipped(CART).to_string();
    for ((from, to), on) in MUTATIONS.iter().zip(mask) {
        if *on {
            assert!(src.contains(from), "mutation anchor {from:?} missing");
            src = src.replace(from, to);
        }
    }
    src
}

/// Every call the standard cart app can be asked to make.
fn all_calls(engine: &Engine<'_>) -> Vec<ActionCall> {
    let mut out = Vec::new();
    for inst in engine.app.instance_names() {
        let def = engine.app.concept(inst).unwrap();
        for act in &def.actions {
            for args in engine.domains.tuples(&act.param_sorts()) {
                for role in Role::ALL {
                    out.push(ActionCall::new(inst, &act.name, args.clone(), role));
                }
            }
        }
    }
    out
}

fn random_walk(engine: &Engine<'_>, picks: &[usize], mut visit: impl FnMut(&AppState, &ActionCall)) {
    let calls = all_calls(engine);
    let mut st = engine.init_state();
    for &p in picks {
        let call = &calls[p % calls.len()];
        visit(&st, call);
        if let Ok((next, _)) = engine.step(&st, call) {
            st = next;
        }
    }
}

/// Components an invocation may write, as `(instance, component)`.
fn writes(app: &App, inst: &str, action: &str) -> BTreeSet<(String, String)> {
    let def = app.concept(inst).unwrap();
    def.action(action)
        .map(|a| a.effects.iter().map(|e| (inst.to_string(), e.target().to_string())).collect())
        .unwrap_or_default()
}

fn changed(a: &AppState, b: &AppState) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for (inst, sa) in &a.instances {
        let sb = &b.instances[inst];
        let keys: BTreeSet<&String> = sa.keys().chain(sb.keys()).collect();
        for k in keys {
            if sa.get(k) != sb.get(k) {
                out.insert((inst.clone(), k.clone()));
            }
        }
    }
    out
}

fn replay_preserves(std: &Engine<'_>, cand: &Engine<'_>, calls: &[ActionCall], components: &[String]) -> bool {
    let (mut s, mut c) = (std.init_state(), cand.init_state());
    for call in calls {
        let Ok((sn, _)) = std.step(&s, call) else { return false };
        let Ok((cn, _)) = cand.step(&c, call) else { return false };
        let (sv, cv) = (AppView::new(std.app, &sn), AppView::new(cand.app, &cn));
        for comp in components {
            let same = match (sv.read("cart", comp), cv.read("cart", comp)) {
                (Ok(x), Ok(y)) => x.loose_eq(&y),
                (Err(_), Err(_)) => true,
                _ => false,
            };
            if !same {
                return false;
            }
        }
        (s, c) = (sn, cn);
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_concepts_round_trip(seed in any::<u64>()) {
        let src = common::gen::concept(&mut ChaCha8Rng::seed_from_u64(seed));
        let first = parse_concept(&src).expect("generated text parses");
        let printed = print_concept(&first);
        prop_assert_eq!(&parse_concept(&printed).expect("printed text parses"), &first);
        prop_assert_eq!(print_concept(&parse_concept(&printed).unwrap()), printed);
    }

    #[test]
    fn evaluation_is_pure(seed in any::<u64>(), picks in prop::collection::vec(0usize..500, 0..8)) {
        let app = common::standard_cart_app();
        let engine = Engine::new(&app, &common::cart_domain()).unwrap();
        let def = app.concept("cart").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let names = ["owner", "items", "quantity", "price", "subtotal"];
        let exprs: Vec<_> = (0..8)
            .map(|_| parse_expr(&common::gen::expression(&mut rng, &names, 3)).expect("expression parses"))
            .collect();
        random_walk(&engine, &picks, |st, _| {
            let local = st.instance("cart").unwrap();
            let view = ConceptView::new(def, local);
            for e in &exprs {
                let first = eval(&view, &mut Bindings::new(), e);
                let snapshot = local.clone();
                assert_eq!(first, eval(&view, &mut Bindings::new(), e));
                assert_eq!(&snapshot, local);
            }
        });
    }

    #[test]
    fn derived_subtotal_matches_direct_sum(picks in prop::collection::vec(0usize..500, 0..12)) {
        let app = common::standard_cart_app();
        let engine = Engine::new(&app, &common::cart_domain()).unwrap();
        random_walk(&engine, &picks, |st, _| {
            assert!(st.get("cart", "subtotal").is_none(), "derived value stored");
            let q = match st.get("cart", "quantity") { Some(Value::Map(m)) => m.clone(), _ => BTreeMap::new() };
            let p = match st.get("cart", "price") { Some(Value::Map(m)) => m.clone(), _ => BTreeMap::new() };
            let items = match st.get("cart", "items") { Some(Value::Set(s)) => s.clone(), _ => BTreeSet::new() };
            let direct: i64 = items.iter().map(|i| q[i].as_int().unwrap() * p[i].as_int().unwrap()).sum();
            let derived = AppView::new(&app, st).read("cart", "subtotal").unwrap();
            assert_eq!(derived.as_int(), Some(direct));
        });
    }

    #[test]
    fn steps_write_only_their_effect_targets(picks in prop::collection::vec(0usize..500, 1..16)) {
        let app = common::standard_cart_app();
        let engine = Engine::new(&app, &common::cart_domain()).unwrap();
        random_walk(&engine, &picks, |st, call| {
            let first = engine.step(st, call);
            assert_eq!(first, engine.step(st, call), "step is not deterministic");
            if let Ok((next, step)) = first {
                let mut allowed = writes(&app, &call.instance, &call.action);
                for r in &step.reactions {
                    allowed.extend(writes(&app, &r.instance, &r.action));
                }
                let touched = changed(st, &next);
                assert!(touched.is_subset(&allowed), "{call} touched {touched:?}, may write {allowed:?}");
            }
        });
    }

    #[test]
    fn darkness_needs_a_provider_beneficiary(cat in 0usize..9, ben in 0usize..3, subject in "[A-Z][a-z]{1,6}\\.[a-z]{1,6}") {
        let cats = [
            Category::MissingAction, Category::InitiatorMismatch, Category::PreconditionMismatch,
            Category::BehaviorMismatch, Category::MissingState, Category::MissingSync,
            Category::UnexpectedSync, Category::MappingViolation(Principle::Symmetry), Category::Extension,
        ];
        let b = [Beneficiary::Provider, Beneficiary::User, Beneficiary::Neutral][ben];
        let d = Deviation::new(cats[cat], subject.clone(), Dyad::ImplementedVsExpected, "x");
        let f = DarkFinding::judge(d, b);
        prop_assert_eq!(f.dark, b == Beneficiary::Provider);
        let ann = BenefitAnnotation { default: Beneficiary::Provider, overrides: vec![(subject.clone(), b)] };
        prop_assert_eq!(ann.beneficiary_of(&subject), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inclusion_agrees_with_replay(mask in prop::collection::vec(any::<bool>(), MUTATIONS.len())) {
        let cat = common::catalog();
        let entry = cat.get("ShoppingCart").unwrap();
        let cfg = CheckConfig { depth: 2, ..CheckConfig::default() };
        let std_app = common::standard_cart_app();
        let cand = common::link(common::shipped("catalog/shoppingcart.app"), &[&mutated_cart(&mask)]);
        let report = trace_inclusion(entry, &cand, "cart", &entry.domain, &cfg).unwrap();

        let std = Engine::new(&std_app, &entry.domain).unwrap();
        let cnd = Engine::new(&cand, &entry.domain).unwrap();
        let components: Vec<String> = entry.concept.state.iter().map(|c| c.name.clone()).collect();
        let traces = std.enumerate_traces(2, &TraceOptions::only("cart")).unwrap();
        let preserved = traces
            .iter()
            .filter(|t| {
                let calls: Vec<ActionCall> = t.iter().map(|s| s.call.clone()).collect();
                replay_preserves(&std, &cnd, &calls, &components)
            })
            .count();
        prop_assert_eq!(report.standard_trace_count, traces.len());
        prop_assert_eq!(report.preserved_trace_count, preserved);
        prop_assert_eq!(report.compatible, preserved == traces.len());
    }

    #[test]
    fn removing_actions_never_lowers_the_count(
        mask in prop::collection::vec(any::<bool>(), MUTATIONS.len()),
        drop in prop::collection::vec(any::<bool>(), 6),
    ) {
        let cat = common::catalog();
        let entry = cat.get("ShoppingCart").unwrap();
        let cfg = CheckConfig { depth: 2, ..CheckConfig::default() };
        let app_src = "app Bare\nuse \"shoppingcart.concept\"\ninstance cart: ShoppingCart init { owner = u }\n";
        let base_src = mutated_cart(&mask);
        let mut def = parse_concept(&base_src).unwrap();
        let count = |src: &str| {
            let app = common::link(app_src, &[src]);
            check(entry, &app, None, &BenefitAnnotation::default(), &cfg, &entry.domain).unwrap().findings.len()
        };
        let before = count(&base_src);
        let names: Vec<String> = def.actions.iter().map(|a| a.name.clone()).collect();
        let removed: BTreeSet<&String> = names.iter().zip(&drop).filter(|(_, d)| **d).map(|(n, _)| n).collect();
        def.actions.retain(|a| !removed.contains(&a.name));
        let after = count(&print_concept(&def));
        prop_assert!(after >= before, "removing {:?} lowered the count from {} to {}", removed, before, after);
    }

    #[test]
    fn prominence_never_changes_faithfulness(seed in any::<u64>()) {
        let cat = common::catalog();
        let entry = cat.get("ShoppingCart").unwrap();
        let app = common::standard_cart_app();
        let engine = Engine::new(&app, &entry.domain).unwrap();
        let samples = engine.reachable_states(2, &TraceOptions::default()).unwrap();
        let registry = ConventionRegistry::standard();
        let cfg = CheckConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for path in ["apps/stubhub.ui", "apps/trump.ui", "catalog/shoppingcart.ui"] {
            let ui = common::ui(common::shipped(path));
            let mut bumped = ui.clone();
            for el in bumped.elements_mut() {
                el.prominence = Milli(rng.gen_range(0..=1000));
            }
            let run = |ui| {
                let ctx = MappingContext {
                    engine: &engine,
                    ui,
                    registry: &registry,
                    cfg: &cfg,
                    bound: Some("cart"),
                    standard: Some(entry.concept.as_ref()),
                    independent: &entry.independent,
                    standards: &entry.mapping,
                    samples: samples.clone(),
                };
                check_faithfulness(&ctx)
            };
            prop_assert_eq!(run(&ui), run(&bumped), "{}", path);
        }
    }
}
