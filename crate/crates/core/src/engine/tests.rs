use super::*;
use crate::lang::{parse_app, parse_concept};
use crate::model::{App, ConceptLibrary, Role, Value};

fn library() -> ConceptLibrary {
    let mut lib = ConceptLibrary::new();
    for src in [
        include_str!("../../corpus/catalog/shoppingcart.concept"),
        include_str!("../../corpus/catalog/catalog.concept"),
        include_str!("../../corpus/catalog/order.concept"),
        include_str!("../../corpus/catalog/coupon.concept"),
    ] {
        lib.insert(parse_concept(src).unwrap());
    }
    lib
}

fn standard_cart() -> App {
    App::link(parse_app(include_str!("../../corpus/catalog/shoppingcart.app")).unwrap(), &library()).unwrap()
}

fn cart_catalog(stock_a: u32) -> App {
    let src = format!(
        "app CC instance cart: ShoppingCart init {{ owner = u }}
         instance catalog: Catalog init {{ listed = {{a}} stock = {{a: {stock_a}}} price = {{a: 300}} }}
         sync s when cart.add(i, p) then catalog.removeFromStock(i, 1) catalog.confirmPrice(i, p)"
    );
    App::link(parse_app(&src).unwrap(), &library()).unwrap()
}

fn dom() -> EntityDomains {
    EntityDomains::new().with("Item", &["a"]).with("User", &["u"])
}

fn add(i: &str, p: i64, role: Role) -> ActionCall {
    ActionCall::new("cart", "add", vec![Value::entity(i), Value::Money(p)], role)
}

#[test]
fn empty_start_and_init_override() {
    let app = standard_cart();
    let s = init_state(&app, &dom().with("Item", &["a", "b"])).unwrap();
    assert_eq!(s.get("cart", "items"), Some(&Value::Set(Default::default())));
    assert_eq!(s.get("catalog", "stock").unwrap().to_string(), "{a: 2, b: 1}");
}

#[test]
fn missing_domain() {
    let app = standard_cart();
    let err = init_state(&app, &EntityDomains::new().with("User", &["u"])).unwrap_err();
    assert_eq!(err, EngineError::MissingDomain("Item".into()));
}

#[test]
fn enabled_by_role() {
    let app = cart_catalog(1);
    let eng = Engine::new(&app, &dom()).unwrap();
    let s = eng.init_state();
    let user: Vec<String> = eng.enabled(&s, Role::User).into_iter().map(|(i, a, _)| format!("{i}.{a}")).collect();
    assert!(user.contains(&"cart.add".to_string()));
    assert!(!user.contains(&"cart.remove".to_string()));
    let provider: Vec<String> =
        eng.enabled(&s, Role::Provider).into_iter().map(|(i, a, _)| format!("{i}.{a}")).collect();
    assert!(!provider.contains(&"cart.add".to_string()));
    let (s2, _) = eng.step(&s, &add("a", 300, Role::User)).unwrap();
    let user2 = eng.enabled(&s2, Role::User);
    assert!(user2.iter().any(|(i, a, w)| i == "cart" && a == "remove" && w == &vec![Value::entity("a")]));
}

#[test]
fn add_moves_stock() {
    let app = cart_catalog(1);
    let eng = Engine::new(&app, &dom()).unwrap();
    let (s, step) = eng.step(&eng.init_state(), &add("a", 300, Role::User)).unwrap();
    assert_eq!(s.get("cart", "items").unwrap().to_string(), "{a}");
    assert_eq!(s.get("catalog", "stock").unwrap().to_string(), "{a: 0}");
    assert_eq!(
        step.to_string(),
        "user cart.add(a, 300) => [catalog.removeFromStock(a, 1), catalog.confirmPrice(a, 300)]"
    );
    assert_eq!(step.digest, s.digest());
}

#[test]
fn out_of_stock_fails_atomically() {
    let app = cart_catalog(0);
    let eng = Engine::new(&app, &dom()).unwrap();
    let s = eng.init_state();
    let err = eng.step(&s, &add("a", 300, Role::User)).unwrap_err();
    assert!(matches!(err, StepError::PreconditionFailed { ref action, .. } if action == "Catalog.removeFromStock"));
}

#[test]
fn provider_add_forbidden() {
    let app = cart_catalog(1);
    let eng = Engine::new(&app, &dom()).unwrap();
    let err = eng.step(&eng.init_state(), &add("a", 300, Role::Provider)).unwrap_err();
    assert!(matches!(err, StepError::InitiatorForbidden { .. }));
}

#[test]
fn wrong_price_rejected() {
    let app = cart_catalog(1);
    let eng = Engine::new(&app, &dom()).unwrap();
    let mut d = dom();
    d.money = Some(vec![300, 450]);
    let eng2 = Engine::new(&app, &d).unwrap();
    assert!(eng.step(&eng.init_state(), &add("a", 450, Role::User)).is_err());
    let one = eng2.enumerate_traces(1, &TraceOptions::only("cart")).unwrap();
    assert_eq!(one.len(), 2);
}

#[test]
fn depth_zero_and_one() {
    let app = standard_cart();
    let eng = Engine::new(&app, &dom()).unwrap();
    let zero = eng.enumerate_traces(0, &TraceOptions::only("cart")).unwrap();
    assert_eq!(zero, vec![Vec::new()]);
    let one = eng.enumerate_traces(1, &TraceOptions::only("cart")).unwrap();
    let lines: Vec<String> = one.iter().map(|t| dump_trace(t)).collect();
    assert_eq!(lines, vec!["".to_string(), "user cart.add(a, 300) => [catalog.removeFromStock(a, 1), catalog.confirmPrice(a, 300)]\n".into()]);
}

#[test]
fn depth_two_includes_remove_and_checkout() {
    let app = standard_cart();
    let eng = Engine::new(&app, &dom()).unwrap();
    let two = eng.enumerate_traces(2, &TraceOptions::only("cart")).unwrap();
    let seqs: Vec<Vec<String>> =
        two.iter().map(|t| t.iter().map(|s| format!("{}.{}", s.call.instance, s.call.action)).collect()).collect();
    assert!(seqs.contains(&vec!["cart.add".into(), "cart.remove".into()]));
    assert!(seqs.contains(&vec!["cart.add".into(), "cart.checkout".into()]));
}

#[test]
fn budget_exceeded() {
    let app = standard_cart();
    let eng = Engine::new(&app, &dom()).unwrap();
    let opts = TraceOptions { state_cap: 1, ..TraceOptions::default() };
    assert_eq!(eng.enumerate_traces(3, &opts).unwrap_err(), EngineError::BudgetExceeded(1));
}

#[test]
fn sync_cycle_detected() {
    let mut lib = ConceptLibrary::new();
    lib.insert(parse_concept("concept P purpose \"p\" state n: one Nat actions ping() by either effects n := n + 1").unwrap());
    let app = App::link(parse_app("app Loop instance x: P sync again when x.ping() then x.ping()").unwrap(), &lib).unwrap();
    let eng = Engine::new(&app, &EntityDomains::new()).unwrap();
    let err = eng.step(&eng.init_state(), &ActionCall::new("x", "ping", vec![], Role::User)).unwrap_err();
    assert_eq!(err, StepError::CycleDetected);
}

#[test]
fn change_quantity_reactions_use_pre_trigger_quantity() {
    let app = standard_cart();
    let eng = Engine::new(&app, &dom()).unwrap();
    let (s, _) = eng.step(&eng.init_state(), &add("a", 300, Role::User)).unwrap();
    let call = ActionCall::new("cart", "changeQuantity", vec![Value::entity("a"), Value::Nat(2)], Role::User);
    let (s, step) = eng.step(&s, &call).unwrap();
    assert_eq!(step.reactions[0].to_string(), "catalog.addToStock(a, 1)");
    assert_eq!(s.get("catalog", "stock").unwrap().to_string(), "{a: 0, b: 1}");
    assert_eq!(AppView::new(&app, &s).read("cart", "subtotal").unwrap(), Value::Money(600));
}
