use finecurve_web::{check_annulus_json, family_json, realize_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn realize_c5_on_torus_verifies_and_draws() {
    let v = parse(&realize_json("Dhc", "torus", "fine").unwrap());
    assert_eq!(v["verdict"]["ok"], true);
    assert_eq!(v["curves"], 5);
    let svg = v["svg"].as_str().unwrap();
    assert_eq!(svg.matches("class=\"curve\"").count(), 5);
}

#[test]
fn realize_rejects_bad_input() {
    assert!(realize_json("Dhc", "sphere", "fine").is_err());
    assert!(realize_json("Dhc", "torus", "finitary").is_err());
    assert!(realize_json("~~~", "annulus", "fine").is_err());
}

#[test]
fn c5_has_annulus_obstruction() {
    let v = parse(&check_annulus_json("Dhc").unwrap());
    assert_eq!(v["verdict"]["status"], "Obstruction");
}

#[test]
fn wheel_family() {
    let v = parse(&family_json("wheel:6").unwrap());
    assert_eq!(v["vertices"], 6);
    assert_eq!(v["edges"], 10);
}
