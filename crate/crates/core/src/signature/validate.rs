use super::*;
use crate::diagram::{build_diagram, validate_diagram};
use crate::Finding;
use std::collections::HashSet;

/// Check referential integrity, literal well-formedness and that every axiom
/// (and stored term) elaborates, with equal boundaries on both sides of each axiom.
pub fn validate_signature(sig: &Signature) -> Vec<Finding> {
    let mut f = Vec::new();
    let mut seen = HashSet::new();
    let all = sig
        .objects
        .iter()
        .map(|o| (&o.name, o.line))
        .chain(sig.attributes.iter().map(|a| (&a.name, a.line)))
        .chain(sig.generators.iter().map(|g| (&g.name, g.line)))
        .chain(sig.axioms.iter().map(|a| (&a.name, a.line)))
        .chain(sig.terms.iter().map(|t| (&t.name, t.line)));
    for (n, line) in all {
        if !seen.insert(n.as_str()) {
            f.push(Finding::at(format!("duplicate name '{}'", n), line.0));
        }
        if n == "copy" {
            f.push(Finding::at("'copy' is reserved for the implicit copy attribute", line.0));
        }
    }

    for a in &sig.attributes {
        let l = a.line.0;
        if sig.object(&a.carrier).is_none() {
            f.push(Finding::at(format!("attribute '{}': unknown carrier '{}'", a.name, a.carrier), l));
        }
        match sig.sort_of(&a.value) {
            None => f.push(Finding::at(format!("attribute '{}': unknown value '{}'", a.name, a.value), l)),
            Some(Sort::Entity) => f.push(Finding::at(format!("attribute '{}': attribute value must be data sort", a.name), l)),
            Some(Sort::Data) => {}
        }
    }

    for g in &sig.generators {
        let l = g.line.0;
        for o in g.domain.iter().chain(&g.codomain) {
            if sig.object(o).is_none() {
                f.push(Finding::at(format!("generator '{}': unknown object '{}'", g.name, o), l));
            }
        }
        let params = g.params(sig);
        let check = |lit: &AgreementLiteral, limit: usize, which: &str, f: &mut Vec<Finding>| {
            let mut vals = Vec::new();
            for (attr, pos) in [(&lit.attr_l, lit.pos_l), (&lit.attr_r, lit.pos_r)] {
                if pos >= limit {
                    f.push(Finding::at(format!("generator '{}': {} literal position {} out of range", g.name, which, pos), l));
                    return;
                }
                let ty = &params[pos].ty;
                match sig.literal_attr(attr, ty) {
                    None => {
                        f.push(Finding::at(format!("generator '{}': attribute '{}' does not apply at position {}", g.name, attr, pos), l));
                        return;
                    }
                    Some(ai) if &ai.carrier != ty => {
                        f.push(Finding::at(
                            format!("generator '{}': attribute '{}' has carrier {} but position {} is {}", g.name, attr, ai.carrier, pos, ty),
                            l,
                        ));
                        return;
                    }
                    Some(ai) => vals.push(ai.value),
                }
            }
            if vals[0] != vals[1] {
                f.push(Finding::at(format!("generator '{}': agreement between different data services {} and {}", g.name, vals[0], vals[1]), l));
            }
        };
        for lit in &g.pre {
            check(lit, g.domain.len(), "pre", &mut f);
        }
        for lit in &g.post {
            check(lit, params.len(), "post", &mut f);
        }
    }

    for a in &sig.axioms {
        let l = a.line.0;
        let sides = [build_diagram(&a.lhs, sig), build_diagram(&a.rhs, sig)];
        match sides {
            [Ok(x), Ok(y)] => {
                if x.boundary() != y.boundary() {
                    f.push(Finding::at(
                        format!(
                            "axiom '{}': axiom boundary mismatch ({:?} -> {:?} vs {:?} -> {:?})",
                            a.name, x.inputs, x.outputs, y.inputs, y.outputs
                        ),
                        l,
                    ));
                }
                for d in [&x, &y] {
                    for finding in validate_diagram(d, sig) {
                        f.push(Finding::at(format!("axiom '{}': {}", a.name, finding.message), l));
                    }
                }
            }
            [x, y] => {
                for e in [x.err(), y.err()].into_iter().flatten() {
                    f.push(Finding::at(format!("axiom '{}': {}", a.name, e), l));
                }
            }
        }
    }
    for t in &sig.terms {
        if let Err(e) = build_diagram(&t.term, sig) {
            f.push(Finding::at(format!("term '{}': {}", t.name, e), t.line.0));
        }
    }
    f
}
