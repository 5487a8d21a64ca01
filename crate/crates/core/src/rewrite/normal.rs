//! Normal forms.
//!
//! `normalize_data` is the spider normal form of the data fragment. `normalize` also
//! absorbs the attribute action laws: every Phi is replaced by its expansion,
//! consecutive Gammas of one attribute merge, and a Gamma whose datum is
//! discarded is removed. Under this form the data-service laws, the
//! action laws and both readings of chi are syntactic identities.

use crate::diagram::hyper::{HKind, Hyper, Leg, UnionFind};
use crate::diagram::Diagram;

/// Spider normal form: every connected Mu/Delta/Eps component becomes one
/// spider node (or a plain wire when it has one input and one output).
/// Data components without any source are left as zero-input spiders, which
/// `validate_diagram` reports.
pub fn normalize_data(d: &Diagram) -> Diagram {
    match Hyper::from_diagram(d) {
        Some(mut h) => {
            h.fuse_data();
            h.to_diagram()
        }
        None => d.clone(),
    }
}

fn expand_phi(h: &mut Hyper) -> bool {
    let mut changed = false;
    for n in &mut h.nodes {
        match n.kind.clone() {
            HKind::Phi(a) => {
                // Phi(m, d) -> m'  becomes  Gamma(m) -> (m', d)
                let d = n.ins.pop().unwrap();
                n.outs.push(d);
                n.kind = HKind::Gamma(a);
                changed = true;
            }
            HKind::Gamma(a) if a.starts_with("copy:") => {
                n.kind = HKind::Delta(a["copy:".len()..].to_string());
                changed = true;
            }
            _ => {}
        }
    }
    changed
}

fn merge_gammas(h: &mut Hyper) -> bool {
    let legs = h.legs();
    let pair = h.nodes.iter().enumerate().find_map(|(k, n)| {
        let HKind::Gamma(a) = &n.kind else { return None };
        let out = n.outs[0];
        if legs[out].len() != 2 {
            return None;
        }
        match legs[out].iter().copied().find(|l| *l != Leg::NodeOut(k, 0)) {
            Some(Leg::NodeIn(j, 0)) if j != k && h.nodes[j].kind == HKind::Gamma(a.clone()) => Some((k, j)),
            _ => None,
        }
    });
    let Some((k, j)) = pair else { return false };
    let mut uf = UnionFind::new(h.nets.len());
    uf.union(h.nodes[k].outs[1], h.nodes[j].outs[1]);
    h.nodes[k].outs[0] = h.nodes[j].outs[0];
    let mut removed = vec![false; h.nodes.len()];
    removed[j] = true;
    h.rebuild(&mut uf, &removed);
    true
}

fn drop_discarded_gammas(h: &mut Hyper) -> bool {
    let legs = h.legs();
    let mut uf = UnionFind::new(h.nets.len());
    let mut removed = vec![false; h.nodes.len()];
    let mut any = false;
    for (k, n) in h.nodes.iter().enumerate() {
        if let HKind::Gamma(_) = n.kind {
            if legs[n.outs[1]] == [Leg::NodeOut(k, 1)] {
                uf.union(n.ins[0], n.outs[0]);
                removed[k] = true;
                any = true;
            }
        }
    }
    if any {
        h.rebuild(&mut uf, &removed);
    }
    any
}

/// Full normal form used by proof search.
pub(crate) fn normalize(h: &mut Hyper) {
    loop {
        let mut changed = expand_phi(h);
        if h.nodes.iter().any(|n| n.kind.is_data_primitive()) {
            h.fuse_data();
        }
        while merge_gammas(h) {
            changed = true;
        }
        changed |= drop_discarded_gammas(h);
        if !changed {
            break;
        }
    }
}

pub(crate) fn normalized(d: &Diagram) -> Option<Hyper> {
    let mut h = Hyper::from_diagram(d)?;
    normalize(&mut h);
    Some(h)
}
