//! PDDL bridge: domain and problem emission, plan parsing and validation
//! against the Boolean semantics, plan diagrams, and checking declared
//! conditions against the signature's axioms.
//!
//! The Boolean state of an attribute is kept in one predicate per declared
//! attribute, `agree-<D>-<a>-copy(x, d)`: "attribute `a` of `x` is the data
//! object `d`". Every other agreement predicate is a derived proposition over
//! these atoms.

mod domain;
mod plan;
mod problem;
pub mod sexpr;
mod wiring;

pub use domain::{domain_decl, emit_domain, parse_domain, render_domain, ActionDecl, DomainDecl, PLit, PredDecl};
pub use plan::{action_name, ground_action, parse_plan, validate_plan, validate_plan_with, BoolTrace, Plan, PlanStep, StepCheck};
pub use problem::{emit_problem, parse_problem, Problem};
pub use wiring::{plan_to_diagram, verify_condition, Which};

use crate::boolean::{Atom, AtomSet, BoolError, Proposition, TypedObj, TypedPred};
use crate::diagram::DiagramError;
use crate::rewrite::RewriteError;
use crate::signature::{AttrInfo, Signature};
use crate::Finding;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("signature is invalid: {}", .0.first().map(|f| f.to_string()).unwrap_or_default())]
    InvalidSignature(Vec<Finding>),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown action '{name}'")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: unknown object '{name}'")]
    UnknownObject { line: usize, name: String },
    #[error("line {line}: {action} takes {expected} arguments, found {found}")]
    Arity { line: usize, action: String, expected: usize, found: usize },
    #[error("line {line}: argument '{arg}' of {action} must have type {expected}, found {found}")]
    ArgType { line: usize, action: String, arg: String, expected: String, found: String },
    #[error("line {line}: unknown predicate '{name}'")]
    UnknownPredicate { line: usize, name: String },
    #[error("step {step} ({action}): precondition {predicate} does not hold")]
    InvalidStep { step: usize, action: String, predicate: String },
    #[error("{0} goal is not a literal conjunction")]
    NonConjunctiveGoal(&'static str),
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("literal is not declared on '{0}'")]
    UnknownLiteral(String),
    #[error("step {step}: {msg}")]
    Wiring { step: usize, msg: String },
    #[error(transparent)]
    Bool(#[from] BoolError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

fn check_signature(sig: &Signature) -> Result<(), PddlError> {
    let findings = crate::signature::validate_signature(sig);
    if findings.is_empty() {
        Ok(())
    } else {
        Err(PddlError::InvalidSignature(findings))
    }
}

/// `copy` for implicit copy attributes, the declared name otherwise.
pub(crate) fn short(a: &AttrInfo) -> &str {
    if a.is_copy {
        "copy"
    } else {
        &a.name
    }
}

pub(crate) fn pred_name(a1: &AttrInfo, a2: &AttrInfo) -> String {
    format!("agree-{}-{}-{}", a1.value, short(a1), short(a2))
}

/// State predicates: one `agree-<D>-<a>-copy` per declared attribute.
pub(crate) fn state_preds(sig: &Signature) -> Vec<TypedPred> {
    sig.attributes
        .iter()
        .map(|a| TypedPred {
            name: format!("agree-{}-{}-copy", a.value, a.name),
            arg_types: vec![a.carrier.clone(), a.value.clone()],
        })
        .collect()
}

fn state_atom(atoms: &Arc<AtomSet>, a: &AttrInfo, x: &str, d: &str) -> Option<usize> {
    atoms.index_of(&Atom { pred: format!("agree-{}-{}-copy", a.value, a.name), args: vec![x.to_string(), d.to_string()] })
}

/// `agree(a1(x1), a2(x2))` over state atoms whose universe is `objs`.
/// Missing state atoms read as false.
pub(crate) fn agreement(atoms: &Arc<AtomSet>, objs: &[TypedObj], a1: &AttrInfo, x1: &str, a2: &AttrInfo, x2: &str) -> Proposition {
    let lit = |a: &AttrInfo, x: &str, d: &str| match state_atom(atoms, a, x, d) {
        Some(i) => Proposition::atom(atoms, i),
        None => Proposition::bot(atoms),
    };
    match (a1.is_copy, a2.is_copy) {
        (true, true) if x1 == x2 => Proposition::top(atoms),
        (true, true) => Proposition::bot(atoms),
        (false, true) => lit(a1, x1, x2),
        (true, false) => lit(a2, x2, x1),
        (false, false) => {
            let mut p = Proposition::bot(atoms);
            for d in objs.iter().filter(|o| o.ty == a1.value) {
                let both = lit(a1, x1, &d.name).and(&lit(a2, x2, &d.name)).unwrap();
                p = p.or(&both).unwrap();
            }
            p
        }
    }
}

/// At most one value of `a` for entity `x`.
pub(crate) fn at_most_one(atoms: &Arc<AtomSet>, objs: &[TypedObj], a: &AttrInfo, x: &str) -> Proposition {
    let vals: Vec<usize> = objs.iter().filter(|o| o.ty == a.value).filter_map(|d| state_atom(atoms, a, x, &d.name)).collect();
    let mut p = Proposition::top(atoms);
    for (k, &i) in vals.iter().enumerate() {
        for &j in &vals[k + 1..] {
            let both = Proposition::atom(atoms, i).and(&Proposition::atom(atoms, j)).unwrap();
            p = p.and(&both.not()).unwrap();
        }
    }
    p
}

/// Parse `agree-<D>-<a1>-<a2>` applied to typed objects into attribute infos.
pub(crate) fn resolve_pred(sig: &Signature, name: &str, t1: &str, t2: &str) -> Option<(AttrInfo, AttrInfo)> {
    let rest = name.strip_prefix("agree-")?;
    let parts: Vec<&str> = rest.split('-').collect();
    let [d, a1, a2] = parts[..] else { return None };
    let i1 = sig.literal_attr(a1, t1)?;
    let i2 = sig.literal_attr(a2, t2)?;
    (i1.value == d && i2.value == d && i1.carrier == t1 && i2.carrier == t2).then_some((i1, i2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::atoms_for;

    fn sig() -> Signature {
        crate::parse_signature("entity R\nentity B\ndata L\nattr at_r : R -> L\nattr at_b : B -> L\n").unwrap()
    }

    #[test]
    fn entity_agreement_is_a_disjunction_over_values() {
        let sig = sig();
        let objs = vec![TypedObj::new("r", "R"), TypedObj::new("b", "B"), TypedObj::new("l1", "L"), TypedObj::new("l2", "L")];
        let atoms = atoms_for(&state_preds(&sig), &objs).unwrap();
        assert_eq!(atoms.len(), 4);
        let (ar, ab) = resolve_pred(&sig, "agree-L-at_r-at_b", "R", "B").unwrap();
        let p = agreement(&atoms, &objs, &ar, "r", &ab, "b");
        // oracle: enumerate the 16 valuations by hand
        let idx = |p: &str, x: &str, d: &str| atoms.index_of(&Atom { pred: p.into(), args: vec![x.into(), d.into()] }).unwrap();
        for v in 0u32..16 {
            let bit = |i: usize| v >> i & 1 == 1;
            let want = (bit(idx("agree-L-at_r-copy", "r", "l1")) && bit(idx("agree-L-at_b-copy", "b", "l1")))
                || (bit(idx("agree-L-at_r-copy", "r", "l2")) && bit(idx("agree-L-at_b-copy", "b", "l2")));
            assert_eq!(p.holds(v), want);
        }
        assert!(resolve_pred(&sig, "agree-L-at_r-at_b", "B", "R").is_none());
        let (c, c2) = resolve_pred(&sig, "agree-L-copy-copy", "L", "L").unwrap();
        assert!(agreement(&atoms, &objs, &c, "l1", &c2, "l1").is_top());
        assert!(agreement(&atoms, &objs, &c, "l1", &c2, "l2").is_bot());
    }

    #[test]
    fn at_most_one_value() {
        let sig = sig();
        let objs = vec![TypedObj::new("r", "R"), TypedObj::new("l1", "L"), TypedObj::new("l2", "L"), TypedObj::new("l3", "L")];
        let atoms = atoms_for(&state_preds(&sig), &objs).unwrap();
        let a = sig.attr_info("at_r").unwrap();
        let p = at_most_one(&atoms, &objs, &a, "r");
        for v in 0u32..8 {
            assert_eq!(p.holds(v), v.count_ones() <= 1);
        }
    }
}
