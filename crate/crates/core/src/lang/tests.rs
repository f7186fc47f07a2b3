use super::*;
use crate::model::{BinOp, ComponentKind, Initiator, Literal, Sort, UpdateStmt};

const CART: &str = include_str!("../../corpus/catalog/shoppingcart.concept");

#[test]
fn parses_cart_concept() {
    let c = parse_concept(CART).unwrap();
    assert_eq!(c.name, "ShoppingCart");
    assert_eq!(c.type_params, vec!["User", "Item"]);
    let names: Vec<&str> = c.state.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["owner", "items", "quantity", "price", "subtotal"]);
    assert!(c.component("subtotal").unwrap().is_derived());
    assert_eq!(c.component("quantity").unwrap().kind, ComponentKind::Map(Sort::Entity("Item".into()), Sort::Nat));
    let add = c.action("add").unwrap();
    assert_eq!(add.initiator, Initiator::User);
    assert_eq!(add.effects.len(), 3);
    assert!(matches!(add.effects[1], UpdateStmt::Put { .. }));
    assert_eq!(c.action("checkout").unwrap().effects.len(), 3);
}

#[test]
fn params_shadow_state() {
    let c = parse_concept("concept C purpose \"x\" state n: one Nat actions a(n: Nat) by user requires n > 0").unwrap();
    assert_eq!(c.actions[0].precondition, Expr::bin(BinOp::Gt, Expr::var("n"), Expr::int(0)));
}

#[test]
fn missing_effect_rhs_reports_position() {
    let src = "concept C purpose \"x\"\nstate\n  s: set Item\nactions\n  a(i: Item) by user\n    effects s +=\n";
    let err = parse_concept(src).unwrap_err();
    assert_eq!(err.line, 6);
    assert!(err.column >= 13, "{err}");
}

#[test]
fn empty_input_errors_at_origin() {
    let err = parse_concept("").unwrap_err();
    assert_eq!((err.line, err.column), (1, 1));
}

#[test]
fn precedence_and_parens() {
    let e = parse_expr("a + b * c = d or not e and f").unwrap();
    let printed = print_expr(&e);
    assert_eq!(printed, "a + b * c = d or not e and f");
    let e2 = parse_expr("(a + b) * c").unwrap();
    assert_eq!(print_expr(&e2), "(a + b) * c");
    let e3 = parse_expr("a - (b - c)").unwrap();
    assert_eq!(print_expr(&e3), "a - (b - c)");
    assert_eq!(parse_expr(&print_expr(&e3)).unwrap(), e3);
    let e4 = parse_expr("not (a = b)").unwrap();
    assert_eq!(print_expr(&e4), "not a = b");
    assert!(matches!(e4, Expr::Not(_)));
}

#[test]
fn literals_and_cardinality() {
    let e = parse_expr("|items| > 0 and owner != none and x = @a and t = \"q\"").unwrap();
    let mut lits = Vec::new();
    fn walk(e: &Expr, out: &mut Vec<Literal>) {
        match e {
            Expr::Lit(l) => out.push(l.clone()),
            Expr::Binary(_, l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Expr::Not(i) | Expr::Card(i) => walk(i, out),
            _ => {}
        }
    }
    walk(&e, &mut lits);
    assert!(lits.contains(&Literal::Entity("a".into())));
    assert!(lits.contains(&Literal::None));
}

#[test]
fn concept_round_trip() {
    let c = parse_concept(CART).unwrap();
    let printed = print_concept(&c);
    assert_eq!(parse_concept(&printed).unwrap(), c);
    assert_eq!(print_concept(&parse_concept(&printed).unwrap()), printed);
}

#[test]
fn app_with_syncs() {
    let src = r#"
app Shop
use "shoppingcart.concept"
instance cart: ShoppingCart init { owner = u }
instance catalog: Catalog
sync stock when cart.add(i, _) then catalog.removeFromStock(i, 1) catalog.confirmPrice(i, cart.price[i])
sync gift when cart.add(@a, 300) then cart.add(gift, 0)
"#;
    let a = parse_app(src).unwrap();
    assert_eq!(a.instances.len(), 2);
    assert_eq!(a.syncs[0].reactions.len(), 2);
    assert_eq!(a.syncs[1].trigger.pattern.len(), 2);
    let again = parse_app(&print_app(&a)).unwrap();
    assert_eq!(again, a);
}

#[test]
fn ui_parse_and_pairing() {
    let src = r#"
screen prefs {
  element on: Button label "Enable" triggers notes.enable() prominence 0.9 steps 1 paired off
  element off: Button label "No thanks" triggers notes.disable() prominence 0.2 steps 1 paired on
  element count: Label label "Sent" displays notes.sent prominence 0.5 steps 0 hidden
}
"#;
    let u = parse_ui(src).unwrap();
    assert_eq!(u.elements().count(), 3);
    assert_eq!(u.element("off").unwrap().prominence.0, 200);
    assert!(!u.element("count").unwrap().visible);
    assert_eq!(parse_ui(&print_ui(&u)).unwrap(), u);

    let bad = src.replace("paired on", "");
    let err = parse_ui(&bad).unwrap_err();
    assert_eq!(err.line, 3);
}

#[test]
fn prominence_out_of_range() {
    let err = parse_ui("screen s { element e: Icon label \"x\" static prominence 1.5 steps 0 }").unwrap_err();
    assert!(err.message.contains("prominence"));
}

#[test]
fn kind_detection() {
    assert_eq!(FileKind::from_path(Path::new("a/b.catalog")), Some(FileKind::Entry));
    assert_eq!(detect_kind("// c\nscenario X {"), Some(FileKind::Scenario));
    assert!(parse_source(Path::new("x.txt"), "hello").is_err());
}
