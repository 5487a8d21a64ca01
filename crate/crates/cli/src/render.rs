use attrcat::diagram::{Diagram, Endpoint};
use attrcat::Signature;
use std::fmt::Write;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn end(e: Endpoint, input: bool) -> String {
    match (e, input) {
        (Endpoint::Boundary(i), true) => format!("in{}", i),
        (Endpoint::Boundary(i), false) => format!("out{}", i),
        (Endpoint::Port(n, _), _) => format!("n{}", n),
    }
}

/// DOT text for a diagram, top to bottom. Entity wires are solid and data
/// wires dashed; generator nodes are boxes, data and attribute nodes are
/// small circles. Output depends only on the diagram, so it is stable.
pub fn render_dot(d: &Diagram, sig: &Signature) -> String {
    let mut s = String::new();
    s.push_str("digraph diagram {\n  rankdir=TB;\n  node [fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\", fontsize=10];\n");
    if !d.inputs.is_empty() {
        s.push_str("  { rank=source;");
        for i in 0..d.inputs.len() {
            let _ = write!(s, " in{};", i);
        }
        s.push_str(" }\n");
    }
    for (i, t) in d.inputs.iter().enumerate() {
        let _ = writeln!(s, "  in{} [shape=point, xlabel=\"{}\"];", i, esc(t));
    }
    for (k, n) in d.nodes.iter().enumerate() {
        let label = match &n.tag {
            Some(t) => format!("{}\\n{}", esc(&n.kind.label()), esc(t)),
            None => esc(&n.kind.label()),
        };
        let shape = if matches!(n.kind, attrcat::diagram::NodeKind::Generator(_)) { "box" } else { "circle, width=0.3, fixedsize=false" };
        let _ = writeln!(s, "  n{} [shape={}, label=\"{}\"];", k, shape, label);
    }
    for (j, t) in d.outputs.iter().enumerate() {
        let _ = writeln!(s, "  out{} [shape=point, xlabel=\"{}\"];", j, esc(t));
    }
    if !d.outputs.is_empty() {
        s.push_str("  { rank=sink;");
        for j in 0..d.outputs.len() {
            let _ = write!(s, " out{};", j);
        }
        s.push_str(" }\n");
    }
    let mut wires: Vec<_> = d.wires.iter().collect();
    wires.sort_by_key(|w| (w.src, w.dst));
    for w in wires {
        let style = if sig.is_data(&w.ty) { "dashed" } else { "solid" };
        let label = match &w.label {
            Some(l) => format!("{}: {}", l, w.ty),
            None => w.ty.clone(),
        };
        let _ = writeln!(s, "  {} -> {} [style={}, label=\"{}\"];", end(w.src, true), end(w.dst, false), style, esc(&label));
    }
    s.push_str("}\n");
    s
}
