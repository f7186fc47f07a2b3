//! UI mapping checks on variations of the shipped screens.

mod common;

use conceptkit::catalog::Catalog;
use conceptkit::engine::{Engine, TraceOptions};
use conceptkit::ui::{
    check_all, derive_observed, identify_evoked, CheckConfig, ConventionRegistry, MappingContext, Meaning, UiModel,
};
use conceptkit::{App, Category, Dyad, Principle, Role};

const CART_UI: &str = "catalog/shoppingcart.ui";
const CHECKOUT: &str = "prominence 0.9 steps 2 style \"primary\" convention \"checkout-button\"";

fn run(cat: &Catalog, entry: &str, app: &App, ui: &UiModel, cfg: &CheckConfig) -> Vec<(Dyad, Category, String)> {
    let entry = cat.get(entry).unwrap();
    let engine = Engine::new(app, &entry.domain).unwrap();
    let samples = engine.reachable_states(cfg.sample_depth, &TraceOptions::default()).unwrap();
    let bound = app
        .model
        .instances
        .iter()
        .find(|i| i.implements.as_deref().unwrap_or(&i.concept) == entry.concept_name())
        .map(|i| i.name.as_str());
    let registry = ConventionRegistry::standard();
    let ctx = MappingContext {
        engine: &engine,
        ui,
        registry: &registry,
        cfg,
        bound,
        standard: Some(entry.concept.as_ref()),
        independent: &entry.independent,
        standards: &entry.mapping,
        samples,
    };
    check_all(&ctx).into_iter().map(|d| (d.dyad, d.category, d.subject)).collect()
}

fn cart_with(edit: impl FnOnce(&str) -> String) -> Vec<(Dyad, Category, String)> {
    let src = edit(common::shipped(CART_UI));
    run(&common::catalog(), "ShoppingCart", &common::standard_cart_app(), &common::ui(&src), &CheckConfig::default())
}

fn obs(cat: Category, subject: &str) -> (Dyad, Category, String) {
    (Dyad::ObservedVsExpected, cat, subject.to_string())
}

fn imp(cat: Category, subject: &str) -> (Dyad, Category, String) {
    (Dyad::ImplementedVsExpected, cat, subject.to_string())
}

#[test]
fn standard_screens_are_clean() {
    let cat = common::catalog();
    for e in &cat.entries {
        let ui = e.standard_ui.as_ref().unwrap();
        assert!(run(&cat, &e.name, &e.standard_app, ui, &CheckConfig::default()).is_empty(), "{}", e.name);
    }
}

#[test]
fn absent_control_breaks_correspondence() {
    let got = cart_with(|s| {
        s.replace(&format!("  element checkout: Button label \"Checkout\"\n    triggers cart.checkout()\n    {CHECKOUT}\n"), "")
    });
    assert_eq!(got, [obs(Category::MappingViolation(Principle::Correspondence), "ShoppingCart.checkout")]);
}

#[test]
fn deep_or_faint_control_is_not_observed() {
    let deep = cart_with(|s| s.replace(CHECKOUT, &CHECKOUT.replace("steps 2", "steps 9")));
    assert_eq!(deep, [obs(Category::MissingAction, "ShoppingCart.checkout")]);
    let faint = cart_with(|s| s.replace(CHECKOUT, &CHECKOUT.replace("prominence 0.9", "prominence 0.01")));
    assert_eq!(faint, [obs(Category::MissingAction, "ShoppingCart.checkout")]);
}

#[test]
fn thresholds_come_from_the_config() {
    let src = common::shipped(CART_UI).replace(CHECKOUT, &CHECKOUT.replace("steps 2", "steps 9"));
    let cfg = CheckConfig { max_steps: 10, ..CheckConfig::default() };
    let got = run(&common::catalog(), "ShoppingCart", &common::standard_cart_app(), &common::ui(&src), &cfg);
    assert!(got.is_empty(), "{got:?}");
}

#[test]
fn misleading_label() {
    let got = cart_with(|s| s.replace("element checkout: Button label \"Checkout\"", "element checkout: Button label \"Continue\""));
    assert_eq!(
        got,
        [
            obs(Category::InitiatorMismatch, "ShoppingCart.checkout"),
            imp(Category::MappingViolation(Principle::Faithfulness), "ShoppingCart.checkout"),
        ]
    );
}

#[test]
fn unguarded_quantity_field() {
    let got = cart_with(|s| {
        s.replace(
            "triggers cart.changeQuantity(a, _) enabled when q <= catalog.stock[@a] + cart.quantity[@a]",
            "triggers cart.changeQuantity(a, _)",
        )
    });
    assert_eq!(got, [obs(Category::MappingViolation(Principle::Standard), "ShoppingCart.changeQuantity")]);
}

#[test]
fn reserved_label_on_the_wrong_value() {
    let got = cart_with(|s| s.replace("element lineA: Label label \"Price\"", "element lineA: Label label \"Subtotal\""));
    assert_eq!(got, [imp(Category::MappingViolation(Principle::Faithfulness), "ShoppingCart.subtotal")]);
}

#[test]
fn inconsistent_price_styles() {
    let got = cart_with(|s| {
        s.replace(
            "displays cart.price[b]\n    prominence 0.5 steps 2 style \"price\"",
            "displays cart.price[b]\n    prominence 0.5 steps 2 style \"promo\"",
        )
    });
    assert_eq!(got, [obs(Category::MappingViolation(Principle::Consistency), "ShoppingCart.price")]);
}

#[test]
fn per_item_control_and_required_display() {
    let no_remove_b = cart_with(|s| {
        s.replace("  element removeB: Button label \"Remove\"\n    triggers cart.remove(b)\n    prominence 0.4 steps 2 style \"secondary\"\n", "")
    });
    assert_eq!(no_remove_b, [obs(Category::MappingViolation(Principle::Standard), "ShoppingCart.remove")]);
    let no_subtotal = cart_with(|s| {
        s.replace("  element subtotal: Label label \"Subtotal\"\n    displays cart.subtotal\n    prominence 0.7 steps 2\n", "")
    });
    assert_eq!(no_subtotal, [obs(Category::MappingViolation(Principle::Standard), "ShoppingCart.subtotal")]);
}

#[test]
fn hidden_elements_do_not_count() {
    let got = cart_with(|s| {
        s.replace(
            "displays cart.subtotal\n    prominence 0.7 steps 2\n",
            "displays cart.subtotal\n    prominence 0.7 steps 2 hidden\n",
        )
    });
    assert_eq!(got, [obs(Category::MappingViolation(Principle::Standard), "ShoppingCart.subtotal")]);
}

#[test]
fn convention_token_on_the_wrong_action() {
    let got = cart_with(|s| {
        s.replace(
            "triggers cart.remove(a)\n    prominence 0.4 steps 2 style \"secondary\"",
            "triggers cart.remove(a)\n    prominence 0.4 steps 2 style \"secondary\" convention \"add-to-cart-button\"",
        )
    });
    assert_eq!(got, [obs(Category::MappingViolation(Principle::Conventions), "ShoppingCart.remove")]);
}

#[test]
fn unequal_paired_choices() {
    let cat = common::catalog();
    let e = cat.get("Notification").unwrap();
    let ui = common::ui(common::shipped("apps/mymedic.ui"));
    let got = run(&cat, "Notification", &e.standard_app, &ui, &CheckConfig::default());
    assert_eq!(got, [obs(Category::MappingViolation(Principle::Symmetry), "Notification.disable")]);
    // A wide enough tolerance accepts the same screen.
    let loose = CheckConfig { epsilon: conceptkit::ui::Milli(800), ..CheckConfig::default() };
    assert!(run(&cat, "Notification", &e.standard_app, &ui, &loose).is_empty());
}

#[test]
fn buried_opt_out() {
    let cat = common::catalog();
    let e = cat.get("PrivacySetting").unwrap();
    let ui = common::ui(common::shipped("apps/facebook.ui"));
    let got = run(&cat, "PrivacySetting", &e.standard_app, &ui, &CheckConfig::default());
    assert!(got.contains(&obs(Category::MappingViolation(Principle::Reach), "PrivacySetting.reject")), "{got:?}");
    assert!(got.contains(&obs(Category::MissingAction, "PrivacySetting.reject")), "{got:?}");
}

#[test]
fn evocation_needs_k_idioms() {
    let reg = ConventionRegistry::standard();
    let ui = common::ui(common::shipped(CART_UI));
    let ev = identify_evoked(&ui, &reg, 2);
    let cart = ev.iter().find(|e| e.concept == "ShoppingCart").expect("cart evoked");
    assert!(cart.evidence.iter().any(|e| e == "token add-to-cart-button"), "{:?}", cart.evidence);
    assert!(cart.evidence.iter().any(|e| e == "label \"checkout\""), "{:?}", cart.evidence);
    assert!(identify_evoked(&ui, &reg, 100).is_empty());
    assert!(identify_evoked(&common::ui(common::shipped("apps/stitchfix.ui")), &reg, 2).is_empty());
}

#[test]
fn registry_labels_ignore_case() {
    let reg = ConventionRegistry::standard();
    assert_eq!(reg.label("  ADD TO CART "), Some(&Meaning::action("ShoppingCart", "add")));
    assert_eq!(reg.label("continue"), Some(&Meaning::NoAction));
    assert!(reg.token("x-close").is_some_and(|m| m.admits("Subscription", "cancel", true)));
    assert!(reg.label("Buy it").is_none());
}

#[test]
fn observed_concept_from_the_cart_screens() {
    let cat = common::catalog();
    let entry = cat.get("ShoppingCart").unwrap();
    let app = common::standard_cart_app();
    let engine = Engine::new(&app, &entry.domain).unwrap();
    let ui = common::ui(common::shipped(CART_UI));
    let registry = ConventionRegistry::standard();
    let cfg = CheckConfig::default();
    let ctx = MappingContext {
        engine: &engine,
        ui: &ui,
        registry: &registry,
        cfg: &cfg,
        bound: Some("cart"),
        standard: Some(entry.concept.as_ref()),
        independent: &entry.independent,
        standards: &entry.mapping,
        samples: vec![engine.init_state()],
    };
    let (observed, syncs) = derive_observed(&ctx);
    let cart = &observed["ShoppingCart"];
    let add = &cart.actions["add"];
    assert_eq!(add.min_steps, 1);
    assert_eq!(add.initiators.iter().copied().collect::<Vec<_>>(), [Role::User]);
    assert_eq!(add.elements, ["addA", "addB"]);
    assert!(cart.states.contains_key("subtotal"));
    assert!(syncs.is_empty());
}
