use super::matcher::{rewrite_all, split_all, Mode};
use super::normal::normalized;
use super::rules::{Dir, RuleKind, RuleSet};
use super::{RewriteError, SPLIT_MAX_LEGS};
use crate::diagram::hyper::{iso, Hyper};
use crate::diagram::Diagram;
use crate::signature::Signature;
use std::collections::HashSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    /// Index into the ordered list of results of applying the rule.
    pub at: usize,
    pub dir: Dir,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {} {}", self.rule, self.at, self.dir.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Leq,
}

/// A replayable derivation. Steps act on normal forms: replaying starts from
/// the normal form of `start` and must end isomorphic to that of `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub relation: Relation,
    pub steps: Vec<Step>,
    pub start: Diagram,
    pub end: Diagram,
}

impl Proof {
    /// One `<rule> @ <location> <l2r|r2l>` line per step.
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{}\n", s)).collect()
    }

    pub fn parse_steps(text: &str) -> Result<Vec<Step>, RewriteError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || RewriteError::ProofSyntax { line: i + 1 };
            let (rule, rest) = line.split_once(" @ ").ok_or_else(bad)?;
            let (at, dir) = rest.trim().split_once(' ').ok_or_else(bad)?;
            out.push(Step {
                rule: rule.trim().to_string(),
                at: at.parse().map_err(|_| bad())?,
                dir: Dir::parse(dir.trim()).ok_or_else(bad)?,
            });
        }
        Ok(out)
    }

    /// Check that the steps lead from `start` to `end` and respect the relation.
    pub fn replay(&self, sig: &Signature) -> Result<(), RewriteError> {
        let rules = RuleSet::for_signature(sig)?;
        let data: HashSet<String> = sig.data_objects().map(|o| o.name.clone()).collect();
        let mut cur = normalized(&self.start).ok_or(RewriteError::Malformed)?;
        for (i, s) in self.steps.iter().enumerate() {
            let results = normal_step(&rules, &data, &cur, &s.rule, s.dir, self.relation)?;
            cur = results.into_iter().nth(s.at).ok_or(RewriteError::NoMatch { step: i + 1 })?;
        }
        let end = normalized(&self.end).ok_or(RewriteError::Malformed)?;
        if iso(&cur, &end) {
            Ok(())
        } else {
            Err(RewriteError::ReplayMismatch)
        }
    }
}

/// Results of one rule application on a normal form, in location order.
pub(crate) fn normal_step(
    rules: &RuleSet,
    data: &HashSet<String>,
    h: &Hyper,
    name: &str,
    dir: Dir,
    rel: Relation,
) -> Result<Vec<Hyper>, RewriteError> {
    let rule = rules.get(name).ok_or_else(|| RewriteError::UnknownRule(name.to_string()))?;
    if rule.kind == RuleKind::Leq && (rel == Relation::Equal || dir == Dir::R2L) {
        return Err(RewriteError::Direction(name.to_string()));
    }
    if let Some(ty) = &rule.split {
        return Ok(split_all(h, ty, SPLIT_MAX_LEGS));
    }
    match rule.norm_sides(dir) {
        Some((l, r)) if rule.norm_dirs.contains(&dir) => Ok(rewrite_all(h, l, r, Mode::Normal, data)),
        _ => Ok(vec![]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let p = Proof {
            relation: Relation::Equal,
            steps: vec![
                Step { rule: "moveto_nat".into(), at: 0, dir: Dir::L2R },
                Step { rule: "place_nat~eps{2,3}".into(), at: 3, dir: Dir::R2L },
            ],
            start: Diagram::default(),
            end: Diagram::default(),
        };
        let t = p.to_text();
        assert_eq!(t, "moveto_nat @ 0 l2r\nplace_nat~eps{2,3} @ 3 r2l\n");
        assert_eq!(Proof::parse_steps(&t).unwrap(), p.steps);
        assert!(matches!(Proof::parse_steps("x @ y l2r"), Err(RewriteError::ProofSyntax { line: 1 })));
    }
}
