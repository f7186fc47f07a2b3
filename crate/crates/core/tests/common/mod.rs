//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod gen;

use conceptkit::catalog::{builtin_file, load_builtin_catalog, Catalog, Loader};
use conceptkit::engine::EntityDomains;
use conceptkit::lang::{parse_app, parse_concept, parse_ui};
use conceptkit::ui::UiModel;
use conceptkit::{App, ConceptDef, ConceptLibrary};

pub fn catalog() -> Catalog {
    load_builtin_catalog(&Loader::new()).expect("builtin catalog loads")
}

pub fn shipped(path: &str) -> &'static str {
    builtin_file(path).unwrap_or_else(|| panic!("no shipped file {path}")).1
}

pub fn shipped_concept(name: &str) -> ConceptDef {
    parse_concept(shipped(name)).expect("shipped concept parses")
}

/// Links app text against shipped concepts plus any extra concept sources.
pub fn link(app_src: &str, extra: &[&str]) -> App {
    let model = parse_app(app_src).expect("app parses");
    let mut lib = ConceptLibrary::new();
    for u in &model.uses {
        if let Some((_, src)) = builtin_file(u) {
            lib.insert(parse_concept(src).expect("concept parses"));
        }
    }
    for src in extra {
        lib.insert(parse_concept(src).expect("extra concept parses"));
    }
    App::link(model, &lib).expect("app links")
}

pub fn ui(src: &str) -> UiModel {
    parse_ui(src).expect("ui parses")
}

pub fn cart_domain() -> EntityDomains {
    EntityDomains::new().with("Item", &["a", "b"]).with("User", &["u"])
}

/// The standard cart, catalog, order, and coupon composition.
pub fn standard_cart_app() -> App {
    link(shipped("catalog/shoppingcart.app"), &[])
}

/// Cart and catalog joined by the stock syncs, with the given items listed.
pub fn cart_catalog_src(items: &[(&str, u32, i64)]) -> String {
    let listed: Vec<&str> = items.iter().map(|(i, _, _)| *i).collect();
    let stock: Vec<String> = items.iter().map(|(i, s, _)| format!("{i}: {s}")).collect();
    let price: Vec<String> = items.iter().map(|(i, _, p)| format!("{i}: {p}")).collect();
    format!(
        "app CartCatalog
use \"shoppingcart.concept\"
use \"catalog.concept\"
instance cart: ShoppingCart init {{ owner = u }}
instance catalog: Catalog init {{
  listed = {{{}}}
  stock = {{{}}}
  price = {{{}}}
}}
sync addStock when cart.add(i, p)
  then catalog.removeFromStock(i, 1)
       catalog.confirmPrice(i, p)
sync removeStock when cart.remove(i)
  then catalog.addToStock(i, cart.quantity[i])
sync quantityStock when cart.changeQuantity(i, q)
  then catalog.addToStock(i, cart.quantity[i])
       catalog.removeFromStock(i, q)
",
        listed.join(", "),
        stock.join(", "),
        price.join(", ")
    )
}
