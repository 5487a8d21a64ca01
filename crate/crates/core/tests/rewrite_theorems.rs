use attrcat::rewrite::{prove_equal, prove_leq, Budget, Outcome};
use attrcat::term::parse_term;
use attrcat::{build_diagram, parse_signature, validate_signature, Diagram, Signature};
use std::time::Instant;

fn sig() -> Signature {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/robot_ball.attr")).unwrap();
    let s = parse_signature(&text).unwrap();
    assert!(validate_signature(&s).is_empty(), "{:?}", validate_signature(&s));
    s
}

fn d(s: &Signature, t: &str) -> Diagram {
    build_diagram(&parse_term(t).unwrap(), s).unwrap()
}

fn check(lhs: &str, rhs: &str, leq: bool) -> usize {
    let s = sig();
    let (a, b) = (d(&s, lhs), d(&s, rhs));
    let t = Instant::now();
    let out = if leq { prove_leq(&a, &b, &Budget::default(), &s) } else { prove_equal(&a, &b, &Budget::default(), &s) }.unwrap();
    let p = match out {
        Outcome::Proved(p) => p,
        Outcome::Unknown { states } => panic!("{} vs {}: unknown after {} states", lhs, rhs, states),
    };
    p.replay(&s).unwrap();
    assert!(t.elapsed().as_secs() < 10);
    p.steps.len()
}

#[test]
fn pick_precondition_holds_after_moving_to_the_ball() {
    check("@fig1a_lhs", "@fig1a_rhs", false);
}

#[test]
fn carried_ball_ends_at_goal() {
    check("@fig1b_lhs", "@fig1b_rhs", false);
}

#[test]
fn moveto_filter_expansion() {
    check("@eq1_lhs", "@eq1_rhs", false);
}

#[test]
fn pick_absorbs_agreement_filter() {
    check("@pick_chi", "Pick", false);
}

#[test]
fn place_establishes_agreement() {
    check("@chi_place", "Place", false);
}

#[test]
fn filter_then_read_below_identity() {
    check("@prop2_lhs", "@prop2_rhs", true);
}

#[test]
fn agreement_filter_below_identity() {
    check("@prop3_lhs", "@prop3_rhs", true);
}
