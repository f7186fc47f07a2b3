//! Benchmark fixtures shared by the criterion benches.

use conceptkit::catalog::{load_builtin_catalog, Catalog, Loader, Location};
use conceptkit::engine::EntityDomains;
use conceptkit::App;

/// The shipped catalog and the standard cart app with its domain.
pub struct Fixture {
    pub catalog: Catalog,
    pub cart: App,
    pub domain: EntityDomains,
}

pub fn fixture() -> Fixture {
    let loader = Loader::new();
    let catalog = load_builtin_catalog(&loader).expect("shipped catalog loads");
    let cart = loader.load_app(&Location::builtin("catalog/shoppingcart.app")).expect("cart app loads");
    let domain = catalog.require("ShoppingCart").expect("cart entry").domain.clone();
    Fixture { catalog, cart, domain }
}
