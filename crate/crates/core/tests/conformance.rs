//! Structural, behavioural, and binding checks against the shopping-cart entry.

mod common;

use conceptkit::catalog::CatalogEntry;
use conceptkit::conformance::{
    bind, check, check_extension, self_check, standard_projection, structural_diff, trace_inclusion, BenefitAnnotation,
    BindingSource, ConformanceError, DeviationReport,
};
use conceptkit::ui::{CheckConfig, ConventionRegistry};
use conceptkit::{App, Beneficiary, Category, Dyad};

const CART: &str = "catalog/shoppingcart.concept";
const APP: &str = "catalog/shoppingcart.app";

fn cart_src() -> &'static str {
    common::shipped(CART)
}

fn with_cart(concept: &str) -> App {
    common::link(common::shipped(APP), &[concept])
}

fn report(entry: &CatalogEntry, app: &App) -> DeviationReport {
    check(entry, app, None, &BenefitAnnotation::uniform(Beneficiary::Provider), &CheckConfig::default(), &entry.domain)
        .expect("check runs")
}

fn keys(r: &DeviationReport) -> Vec<(Category, String, Dyad)> {
    r.deviations().map(|d| (d.category, d.subject.clone(), d.dyad)).collect()
}

fn one(cat: Category, subject: &str) -> Vec<(Category, String, Dyad)> {
    vec![(cat, subject.to_string(), Dyad::ImplementedVsExpected)]
}

#[test]
fn standard_design_is_clean_and_declared() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let r = report(entry, &entry.standard_app);
    assert!(r.findings.is_empty(), "{:?}", r.lines());
    assert_eq!(r.binding.as_ref().unwrap().source, BindingSource::Declared);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn missing_action() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let bare = "app Bare\nuse \"shoppingcart.concept\"\ninstance cart: ShoppingCart init { owner = u }\n";
    let mut def = common::shipped_concept(CART);
    def.actions.retain(|a| a.name != "changeQuantity");
    let app = common::link(bare, &[&conceptkit::lang::print_concept(&def)]);
    assert_eq!(keys(&report(entry, &app)), one(Category::MissingAction, "ShoppingCart.changeQuantity"));
}

#[test]
fn signature_change_counts_as_missing() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = with_cart(&cart_src().replace("add(i: Item, p: Money) by user", "add(i: Item, p: Nat) by user"));
    assert_eq!(keys(&report(entry, &app)), one(Category::MissingAction, "ShoppingCart.add"));
}

#[test]
fn initiator_widened() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = with_cart(&cart_src().replace("changePrice(i: Item, p: Money) by provider", "changePrice(i: Item, p: Money) by either"));
    let r = report(entry, &app);
    assert_eq!(keys(&r), one(Category::InitiatorMismatch, "ShoppingCart.changePrice"));
    assert!(r.findings[0].deviation.evidence.contains("user"));
}

#[test]
fn initiator_narrowed_is_not_a_mismatch() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = with_cart(&cart_src().replace("initialize(u: User) by either", "initialize(u: User) by provider"));
    assert!(report(entry, &app).findings.is_empty());
}

#[test]
fn stricter_precondition() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let r = report(entry, &with_cart(&cart_src().replace("q >= 1", "q >= 2")));
    assert_eq!(keys(&r), one(Category::PreconditionMismatch, "ShoppingCart.changeQuantity"));
    assert!(r.findings[0].deviation.evidence.contains("changeQuantity(a, 1)"));
}

#[test]
fn looser_precondition_is_accepted() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    assert!(report(entry, &with_cart(&cart_src().replace("q >= 1", "q >= 0"))).findings.is_empty());
}

#[test]
fn state_kind_change() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let r = report(entry, &with_cart(&cart_src().replace("price: Item -> Money", "price: Item -> Nat")));
    let ks = keys(&r);
    assert!(ks.contains(&(Category::MissingState, "ShoppingCart.price".into(), Dyad::ImplementedVsExpected)));
    // Writing Money into the Nat map fails, so the writers diverge too.
    assert!(ks.contains(&(Category::BehaviorMismatch, "ShoppingCart.add".into(), Dyad::ImplementedVsExpected)));
    assert!(!ks.iter().any(|k| k.1 == "ShoppingCart.remove" || k.1 == "ShoppingCart.changeQuantity"));
}

#[test]
fn added_action_is_an_extension() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = with_cart(&format!("{}  wish(i: Item) by user\n    requires i in items\n", cart_src()));
    let r = report(entry, &app);
    assert_eq!(keys(&r), one(Category::Extension, "ShoppingCart.wish"));
    // Extensions are dark only through the annotation.
    assert!(r.is_dark());
    let ok = check(entry, &app, None, &BenefitAnnotation::uniform(Beneficiary::User), &CheckConfig::default(), &entry.domain)
        .unwrap();
    assert!(!ok.is_dark());
    let ext = check_extension(entry, &app, None, &CheckConfig::default(), &entry.domain).unwrap();
    assert!(ext.compatible);
    assert_eq!(ext.preserved_trace_count, ext.standard_trace_count);
}

#[test]
fn dropped_sync() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let src = common::shipped(APP).replace("sync placeOrder when cart.checkout()\n  then order.create()\n", "");
    let r = report(entry, &common::link(&src, &[]));
    assert_eq!(keys(&r), one(Category::MissingSync, "ShoppingCart.checkout~Order.create"));
}

#[test]
fn extra_sync_on_a_coupled_action_is_an_extension() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let src = format!("{}sync extra when cart.remove(i)\n  then order.create()\n", common::shipped(APP));
    let r = report(entry, &common::link(&src, &[]));
    assert_eq!(keys(&r), one(Category::Extension, "ShoppingCart.remove~Order.create"));
}

#[test]
fn required_syncs_need_the_peer() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let bare = "app Bare\nuse \"shoppingcart.concept\"\ninstance cart: ShoppingCart init { owner = u }\n";
    assert!(report(entry, &common::link(bare, &[])).findings.is_empty());
}

#[test]
fn behaviour_divergence_has_a_witness() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = with_cart(&cart_src().replace("quantity[i] := 1", "quantity[i] := 2"));
    let r = report(entry, &app);
    assert_eq!(keys(&r), one(Category::BehaviorMismatch, "ShoppingCart.add"));
    let inc = trace_inclusion(entry, &app, "cart", &entry.domain, &CheckConfig::default()).unwrap();
    assert!(!inc.compatible);
    assert_eq!(inc.witness.as_deref(), Some("user cart.add(a, 300)\n"));
    // Only the empty trace and traces avoiding add survive.
    assert!(inc.preserved_trace_count >= 1 && inc.preserved_trace_count < inc.standard_trace_count);
}

#[test]
fn standard_inclusion_preserves_everything() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let inc = trace_inclusion(entry, &entry.standard_app, "cart", &entry.domain, &CheckConfig::default()).unwrap();
    assert!(inc.compatible && inc.witness.is_none() && inc.violations.is_empty());
    assert_eq!(inc.preserved_trace_count, inc.standard_trace_count);
    assert!(inc.standard_trace_count > 1);
}

#[test]
fn projection_keeps_the_peers_the_templates_need() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let p = standard_projection(entry, &entry.standard_app, "cart").unwrap();
    let names: Vec<&str> = p.instance_names().collect();
    for n in ["cart", "catalog", "order", "coupon"] {
        assert!(names.contains(&n), "{names:?}");
    }
    assert_eq!(p.model.syncs.len(), entry.required_syncs.len());
}

#[test]
fn structural_diff_of_standard_is_empty() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let d = structural_diff(entry, &entry.standard_app, "cart", &entry.domain, &CheckConfig::default()).unwrap();
    assert!(d.is_empty(), "{d:?}");
}

#[test]
fn unbound_without_ui_is_an_error() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = common::link("app Other\nuse \"order.concept\"\ninstance order: Order\n", &[]);
    let err = check(entry, &app, None, &BenefitAnnotation::default(), &CheckConfig::default(), &entry.domain);
    assert_eq!(err.unwrap_err(), ConformanceError::UnboundConcept("ShoppingCart".into()));
}

#[test]
fn unevoked_ui_reports_nothing() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = common::link(common::shipped("apps/stitchfix.app"), &[common::shipped("library/personalshopper.concept")]);
    let ui = common::ui(common::shipped("apps/stitchfix.ui"));
    let r = check(entry, &app, Some(&ui), &BenefitAnnotation::uniform(Beneficiary::Provider), &CheckConfig::default(), &entry.domain)
        .unwrap();
    assert!(r.binding.is_none() && r.findings.is_empty());
}

#[test]
fn binding_by_evocation() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = common::link(common::shipped("apps/grove.app"), &[common::shipped("apps/grove.concept")]);
    let ui = common::ui(common::shipped("apps/grove.ui"));
    let cfg = CheckConfig::default();
    let b = bind(entry, &app, Some(&ui), &ConventionRegistry::standard(), &cfg).expect("evoked");
    assert_eq!(b.instance, "cart");
    let BindingSource::Evoked(ev) = b.source else { panic!("not evoked") };
    assert!(ev.len() >= cfg.evoke_k, "{ev:?}");
    // A stricter threshold than the UI offers leaves the design unbound.
    let strict = CheckConfig { evoke_k: 50, ..cfg };
    assert!(bind(entry, &app, Some(&ui), &ConventionRegistry::standard(), &strict).is_none());
    assert!(bind(entry, &app, None, &ConventionRegistry::standard(), &cfg).is_none());
}

#[test]
fn benefit_overrides_select_findings() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = with_cart(&cart_src().replace("q >= 1", "q >= 2").replace("changePrice(i: Item, p: Money) by provider", "changePrice(i: Item, p: Money) by either"));
    let ann = BenefitAnnotation {
        default: Beneficiary::User,
        overrides: vec![("ShoppingCart.changePrice".into(), Beneficiary::Provider)],
    };
    let r = check(entry, &app, None, &ann, &CheckConfig::default(), &entry.domain).unwrap();
    assert_eq!(r.findings.len(), 2);
    let dark: Vec<&str> = r.findings.iter().filter(|f| f.dark).map(|f| f.deviation.subject.as_str()).collect();
    assert_eq!(dark, ["ShoppingCart.changePrice"]);
    assert_eq!(r.exit_code(), 2);
    assert!(r.lines()[0].starts_with("DARK implemented InitiatorMismatch ShoppingCart.changePrice"), "{:?}", r.lines());
}

#[test]
fn every_entry_self_checks_clean() {
    let cat = common::catalog();
    for e in &cat.entries {
        let r = self_check(e, &CheckConfig::default()).unwrap();
        assert!(r.findings.is_empty(), "{}: {:?}", e.name, r.lines());
    }
}
