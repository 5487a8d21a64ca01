//! Equational and inequational reasoning on diagrams.
//!
//! Proof search works on normal forms (see [`normal`]), where the
//! data-service and action laws hold syntactically; the remaining rules are
//! the signature axioms, their variants with discarded data outputs, and the
//! inequalities. `apply_axiom` rewrites raw diagrams with any single rule.

mod matcher;
mod normal;
mod proof;
mod rules;
mod search;

pub use normal::normalize_data;
pub use proof::{Proof, Relation, Step};
pub use rules::{Dir, Rule, RuleKind, RuleSet};

use crate::diagram::hyper::Hyper;
use crate::diagram::{build_diagram, BoundaryType, Diagram, DiagramError};
use crate::par::Exec;
use crate::signature::Signature;
use crate::term::parse_term;
use matcher::{rewrite_all, Mode};
use std::collections::HashSet;
use std::time::Duration;
use thiserror::Error;

/// Nets with more legs than this are not split by `well_behaved` moves.
pub(crate) const SPLIT_MAX_LEGS: usize = 10;

fn show(b: &BoundaryType) -> String {
    format!("{} -> {}", b.inputs.join(" * "), b.outputs.join(" * "))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("boundary mismatch: {} vs {}", show(lhs), show(rhs))]
    BoundaryMismatch { lhs: BoundaryType, rhs: BoundaryType },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("diagram is not well formed")]
    Malformed,
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("rule '{0}' is an inequality and only applies left to right")]
    Direction(String),
    #[error("no match at location {at} ({found} matches)")]
    NoMatchAt { at: usize, found: usize },
    #[error("step {step}: no match")]
    NoMatch { step: usize },
    #[error("proof line {line}: expected '<rule> @ <location> <l2r|r2l>'")]
    ProofSyntax { line: usize },
    #[error("replay does not reach the claimed end diagram")]
    ReplayMismatch,
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_states: usize,
    pub timeout: Duration,
    pub exec: Exec,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_states: 100_000, timeout: Duration::from_secs(10), exec: Exec::default() }
    }
}

impl Budget {
    pub fn states(n: usize) -> Budget {
        Budget { max_states: n, ..Budget::default() }
    }
}

// Proofs are returned once per search, so the size gap is not worth a box.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(Proof),
    /// Budget exhausted or search space closed. Not evidence of inequality.
    Unknown { states: usize },
}

impl Outcome {
    pub fn proof(&self) -> Option<&Proof> {
        match self {
            Outcome::Proved(p) => Some(p),
            Outcome::Unknown { .. } => None,
        }
    }
}

pub fn prove_equal(d1: &Diagram, d2: &Diagram, budget: &Budget, sig: &Signature) -> Result<Outcome, RewriteError> {
    search::search(d1, d2, Relation::Equal, budget, sig)
}

/// Search for `d1 <= d2`: equalities both ways, inequalities left to right.
pub fn prove_leq(d1: &Diagram, d2: &Diagram, budget: &Budget, sig: &Signature) -> Result<Outcome, RewriteError> {
    search::search(d1, d2, Relation::Leq, budget, sig)
}

/// Rewrite `d` with one rule on its raw port graph. Locations index the
/// distinct results in match order.
pub fn apply_axiom(d: &Diagram, rule: &str, at: usize, dir: Dir, sig: &Signature) -> Result<Diagram, RewriteError> {
    let rules = RuleSet::for_signature(sig)?;
    let r = rules.get(rule).ok_or_else(|| RewriteError::UnknownRule(rule.to_string()))?;
    if r.kind == RuleKind::Leq && dir == Dir::R2L {
        return Err(RewriteError::Direction(rule.to_string()));
    }
    let h = Hyper::from_diagram(d).ok_or(RewriteError::Malformed)?;
    let (l, rr) = r.raw_sides(dir);
    let data: HashSet<String> = sig.data_objects().map(|o| o.name.clone()).collect();
    let results = rewrite_all(&h, l, rr, Mode::Raw, &data);
    let found = results.len();
    results.into_iter().nth(at).map(|h| h.to_diagram()).ok_or(RewriteError::NoMatchAt { at, found })
}

/// Number of raw matches of a rule, i.e. the valid locations for [`apply_axiom`].
pub fn count_matches(d: &Diagram, rule: &str, dir: Dir, sig: &Signature) -> Result<usize, RewriteError> {
    let rules = RuleSet::for_signature(sig)?;
    let r = rules.get(rule).ok_or_else(|| RewriteError::UnknownRule(rule.to_string()))?;
    let h = Hyper::from_diagram(d).ok_or(RewriteError::Malformed)?;
    let (l, rr) = r.raw_sides(dir);
    let data: HashSet<String> = sig.data_objects().map(|o| o.name.clone()).collect();
    Ok(rewrite_all(&h, l, rr, Mode::Raw, &data).len())
}

fn elaborate(text: &str, sig: &Signature) -> Result<Diagram, RewriteError> {
    let t = parse_term(text).expect("generated term parses");
    Ok(build_diagram(&t, sig)?)
}

/// The filter of an attribute: read the attribute, join with the given datum, discard.
pub fn derive_phi(attr: &str, sig: &Signature) -> Result<Diagram, RewriteError> {
    let a = sig.attr_info(attr).ok_or_else(|| RewriteError::UnknownAttribute(attr.to_string()))?;
    let (m, d) = (&a.carrier, &a.value);
    elaborate(&format!("(get[{attr}] * id[{d}]) ; (id[{m}] * mu[{d}]) ; (id[{m}] * eps[{d}])"), sig)
}

/// Agreement filter on `M1 * M2`: both attributes are read and their values joined.
pub fn build_chi(a1: &str, a2: &str, sig: &Signature) -> Result<Diagram, RewriteError> {
    for a in [a1, a2] {
        sig.attr_info(a).ok_or_else(|| RewriteError::UnknownAttribute(a.to_string()))?;
    }
    Ok(build_diagram(&crate::term::Term::Chi(a1.into(), a2.into()), sig)?)
}

/// Which attribute is read first; the other side is filtered by its `set`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiOrder {
    /// Read `a1`, filter the right factor with `set[a2]`.
    LeftFirst,
    /// Read `a2`, filter the left factor with `set[a1]`.
    RightFirst,
}

/// The two one-sided readings of the agreement filter.
pub fn build_chi_ordered(a1: &str, a2: &str, order: ChiOrder, sig: &Signature) -> Result<Diagram, RewriteError> {
    let i1 = sig.attr_info(a1).ok_or_else(|| RewriteError::UnknownAttribute(a1.to_string()))?;
    let i2 = sig.attr_info(a2).ok_or_else(|| RewriteError::UnknownAttribute(a2.to_string()))?;
    if i1.value != i2.value {
        return Err(DiagramError::ValueMismatch(a1.to_string(), a2.to_string()).into());
    }
    let (m1, m2, d) = (&i1.carrier, &i2.carrier, &i1.value);
    let text = match order {
        ChiOrder::LeftFirst => format!("(get[{a1}] * id[{m2}]) ; (id[{m1}] * swap[{d},{m2}]) ; (id[{m1}] * set[{a2}])"),
        ChiOrder::RightFirst => format!("(id[{m1}] * get[{a2}]) ; (id[{m1}] * swap[{m2},{d}]) ; (set[{a1}] * id[{m2}])"),
    };
    elaborate(&text, sig)
}
