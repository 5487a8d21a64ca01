use super::hyper::Hyper;
use super::*;
use crate::signature::{Signature, Sort};
use crate::Finding;

fn expected_ports(kind: &NodeKind, sig: &Signature) -> Option<(Vec<String>, Vec<String>)> {
    let v = |x: &str, n: usize| vec![x.to_string(); n];
    Some(match kind {
        NodeKind::Generator(g) => {
            let g = sig.generator(g)?;
            (g.domain.clone(), g.codomain.clone())
        }
        NodeKind::Mu(d) => (v(d, 2), v(d, 1)),
        NodeKind::Delta(d) => (v(d, 1), v(d, 2)),
        NodeKind::Eps(d) => (v(d, 1), vec![]),
        NodeKind::Gamma(a) => {
            let a = sig.attr_info(a)?;
            (vec![a.carrier.clone()], vec![a.carrier, a.value])
        }
        NodeKind::Phi(a) => {
            let a = sig.attr_info(a)?;
            (vec![a.carrier.clone(), a.value], vec![a.carrier])
        }
        NodeKind::Spider(_) => return None,
    })
}

/// Check port uniqueness, typing against the signature and acyclicity.
/// Diagrams containing spiders are checked for realizability instead of
/// plain acyclicity, since fused data nets may feed back.
pub fn validate_diagram(d: &Diagram, sig: &Signature) -> Vec<Finding> {
    let mut f = Vec::new();
    for t in d.inputs.iter().chain(&d.outputs) {
        if sig.object(t).is_none() {
            f.push(Finding::new(format!("unknown boundary type '{}'", t)));
        }
    }
    for (k, n) in d.nodes.iter().enumerate() {
        let name = n.kind.label();
        match (&n.kind, expected_ports(&n.kind, sig)) {
            (NodeKind::Spider(x), _) => {
                if n.inputs.iter().chain(&n.outputs).any(|t| t != x) {
                    f.push(Finding::new(format!("node {} ({}): port types do not match kind", k, name)));
                }
                if n.inputs.is_empty() {
                    f.push(Finding::new(format!("node {} ({}): data component without a source", k, name)));
                }
            }
            (_, None) => f.push(Finding::new(format!("node {} ({}): unknown generator or attribute", k, name))),
            (_, Some((i, o))) => {
                if i != n.inputs || o != n.outputs {
                    f.push(Finding::new(format!("node {} ({}): port types do not match kind", k, name)));
                }
            }
        }
        if n.kind.is_data_primitive() && n.inputs.iter().chain(&n.outputs).any(|t| sig.sort_of(t) == Some(Sort::Entity)) {
            f.push(Finding::new(format!("node {} ({}): data primitive on entity wire", k, name)));
        }
    }

    // endpoint bookkeeping
    let mut in_cnt: Vec<Vec<usize>> = d.nodes.iter().map(|n| vec![0; n.inputs.len()]).collect();
    let mut out_cnt: Vec<Vec<usize>> = d.nodes.iter().map(|n| vec![0; n.outputs.len()]).collect();
    let mut bin = vec![0usize; d.inputs.len()];
    let mut bout = vec![0usize; d.outputs.len()];
    for (w, wire) in d.wires.iter().enumerate() {
        let src_ty = match wire.src {
            Endpoint::Boundary(i) => bin.get_mut(i).map(|c| {
                *c += 1;
                &d.inputs[i]
            }),
            Endpoint::Port(n, p) => out_cnt.get_mut(n).and_then(|v| v.get_mut(p)).map(|c| {
                *c += 1;
                &d.nodes[n].outputs[p]
            }),
        };
        let dst_ty = match wire.dst {
            Endpoint::Boundary(j) => bout.get_mut(j).map(|c| {
                *c += 1;
                &d.outputs[j]
            }),
            Endpoint::Port(n, p) => in_cnt.get_mut(n).and_then(|v| v.get_mut(p)).map(|c| {
                *c += 1;
                &d.nodes[n].inputs[p]
            }),
        };
        match (src_ty, dst_ty) {
            (Some(s), Some(t)) => {
                if s != &wire.ty || t != &wire.ty {
                    f.push(Finding::new(format!("wire {}: type {} does not match its ports", w, wire.ty)));
                }
                let entity = sig.sort_of(&wire.ty) == Some(Sort::Entity);
                let prim = |e: Endpoint| matches!(e, Endpoint::Port(n, _) if d.nodes[n].kind.is_data_primitive());
                if entity && (prim(wire.src) || prim(wire.dst)) {
                    f.push(Finding::new(format!("wire {}: data primitive on entity wire", w)));
                }
            }
            _ => f.push(Finding::new(format!("wire {}: endpoint out of range", w))),
        }
    }
    let mut ports_ok = true;
    let mut check = |count: usize, what: String| {
        if count > 1 {
            f.push(Finding::new(format!("{}: port multiply connected", what)));
            ports_ok = false;
        } else if count == 0 {
            f.push(Finding::new(format!("{}: port unconnected", what)));
            ports_ok = false;
        }
    };
    for (i, &c) in bin.iter().enumerate() {
        check(c, format!("boundary input {}", i));
    }
    for (j, &c) in bout.iter().enumerate() {
        check(c, format!("boundary output {}", j));
    }
    for (n, v) in in_cnt.iter().enumerate() {
        for (p, &c) in v.iter().enumerate() {
            check(c, format!("node {} input {}", n, p));
        }
    }
    for (n, v) in out_cnt.iter().enumerate() {
        for (p, &c) in v.iter().enumerate() {
            check(c, format!("node {} output {}", n, p));
        }
    }
    if ports_ok {
        let has_spider = d.nodes.iter().any(|n| matches!(n.kind, NodeKind::Spider(_)));
        if has_spider {
            if !Hyper::from_diagram(d).map(|h| h.realizable()).unwrap_or(false) {
                f.push(Finding::new("diagram is not realizable (cycle through nodes)"));
            }
        } else if d.topo_order().is_none() {
            f.push(Finding::new("node graph has a cycle"));
        }
    }
    f
}
