//! Typed string diagrams as port graphs.
//!
//! Swaps never appear as nodes: elaboration turns them into wire crossings.
//! `Spider` nodes only arise from normalization; they fuse a connected
//! Mu/Delta/Eps component and treat their legs as unordered.

mod build;
pub(crate) mod hyper;
mod validate;

pub use build::{build_diagram, DiagramError};
pub use validate::validate_diagram;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Generator(String),
    Mu(String),
    Delta(String),
    Eps(String),
    Gamma(String),
    Phi(String),
    Spider(String),
}

impl NodeKind {
    pub fn label(&self) -> String {
        match self {
            NodeKind::Generator(g) => g.clone(),
            NodeKind::Mu(d) => format!("mu[{}]", d),
            NodeKind::Delta(d) => format!("delta[{}]", d),
            NodeKind::Eps(d) => format!("eps[{}]", d),
            NodeKind::Gamma(a) => format!("get[{}]", a),
            NodeKind::Phi(a) => format!("set[{}]", a),
            NodeKind::Spider(d) => format!("spider[{}]", d),
        }
    }

    pub fn is_data_primitive(&self) -> bool {
        matches!(self, NodeKind::Mu(_) | NodeKind::Delta(_) | NodeKind::Eps(_) | NodeKind::Spider(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Boundary(usize),
    Port(usize, usize),
}

/// A wire runs from `src` (boundary input or node output port) to `dst`
/// (boundary output or node input port).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    pub src: Endpoint,
    pub dst: Endpoint,
    pub ty: String,
    /// Free-form annotation (plan diagrams record object names here).
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Annotation for reports and rendering; ignored by isomorphism.
    pub tag: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagram {
    pub nodes: Vec<Node>,
    pub wires: Vec<Wire>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryType {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

pub fn boundary(d: &Diagram) -> BoundaryType {
    BoundaryType { inputs: d.inputs.clone(), outputs: d.outputs.clone() }
}

/// Syntactic identity up to port-graph isomorphism: node kinds, port order and
/// boundary order are preserved; spider legs are unordered.
pub fn iso_check(d1: &Diagram, d2: &Diagram) -> bool {
    match (hyper::Hyper::from_diagram(d1), hyper::Hyper::from_diagram(d2)) {
        (Some(a), Some(b)) => hyper::iso(&a, &b),
        _ => false,
    }
}

impl Diagram {
    pub fn identity(types: &[String]) -> Diagram {
        Diagram {
            nodes: vec![],
            wires: types
                .iter()
                .enumerate()
                .map(|(i, t)| Wire { src: Endpoint::Boundary(i), dst: Endpoint::Boundary(i), ty: t.clone(), label: None })
                .collect(),
            inputs: types.to_vec(),
            outputs: types.to_vec(),
        }
    }

    pub fn boundary(&self) -> BoundaryType {
        boundary(self)
    }

    pub fn generator_names(&self) -> Vec<&str> {
        self.nodes
            .iter()
            .filter_map(|n| match &n.kind {
                NodeKind::Generator(g) => Some(g.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Sequential composition `self ; other`. Types must match exactly.
    pub fn then(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if self.outputs != other.inputs {
            return Err(DiagramError::TypeMismatch { left: self.outputs.clone(), right: other.inputs.clone() });
        }
        let off = self.nodes.len();
        let shift = |e: Endpoint| match e {
            Endpoint::Port(n, p) => Endpoint::Port(n + off, p),
            b => b,
        };
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().cloned());
        let mut wires: Vec<Wire> = self.wires.iter().filter(|w| !matches!(w.dst, Endpoint::Boundary(_))).cloned().collect();
        let mut into_mid: Vec<Option<&Wire>> = vec![None; self.outputs.len()];
        for w in &self.wires {
            if let Endpoint::Boundary(j) = w.dst {
                into_mid[j] = Some(w);
            }
        }
        for w in &other.wires {
            match w.src {
                Endpoint::Boundary(j) => {
                    let a = into_mid[j].expect("open output in left operand");
                    wires.push(Wire {
                        src: a.src,
                        dst: shift(w.dst),
                        ty: w.ty.clone(),
                        label: a.label.clone().or_else(|| w.label.clone()),
                    });
                }
                _ => wires.push(Wire { src: shift(w.src), dst: shift(w.dst), ty: w.ty.clone(), label: w.label.clone() }),
            }
        }
        Ok(Diagram { nodes, wires, inputs: self.inputs.clone(), outputs: other.outputs.clone() })
    }

    /// Tensor `self * other`: other's boundary ports follow self's.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let off = self.nodes.len();
        let (ni, no) = (self.inputs.len(), self.outputs.len());
        let src = |e: Endpoint| match e {
            Endpoint::Port(n, p) => Endpoint::Port(n + off, p),
            Endpoint::Boundary(i) => Endpoint::Boundary(i + ni),
        };
        let dst = |e: Endpoint| match e {
            Endpoint::Port(n, p) => Endpoint::Port(n + off, p),
            Endpoint::Boundary(i) => Endpoint::Boundary(i + no),
        };
        let mut d = self.clone();
        d.nodes.extend(other.nodes.iter().cloned());
        d.wires.extend(other.wires.iter().map(|w| Wire { src: src(w.src), dst: dst(w.dst), ty: w.ty.clone(), label: w.label.clone() }));
        d.inputs.extend(other.inputs.iter().cloned());
        d.outputs.extend(other.outputs.iter().cloned());
        d
    }

    /// Wire incident to a node input port.
    pub fn wire_into(&self, node: usize, port: usize) -> Option<&Wire> {
        self.wires.iter().find(|w| w.dst == Endpoint::Port(node, port))
    }

    /// Wire incident to a node output port.
    pub fn wire_from(&self, node: usize, port: usize) -> Option<&Wire> {
        self.wires.iter().find(|w| w.src == Endpoint::Port(node, port))
    }

    /// Topological order of nodes, or `None` if the node graph has a cycle.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![vec![]; n];
        for w in &self.wires {
            if let (Endpoint::Port(a, _), Endpoint::Port(b, _)) = (w.src, w.dst) {
                if a < n && b < n {
                    succ[a].push(b);
                    indeg[b] += 1;
                }
            }
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// An open wire end held by a [`DiagramBuilder`]. Each end must be consumed exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireEnd {
    src: Endpoint,
    pub ty: String,
    pub label: Option<String>,
}

/// Builds a diagram node by node. Ends are linear: passing an end to `node`
/// or `finish` consumes it.
#[derive(Default)]
pub struct DiagramBuilder {
    d: Diagram,
}

impl DiagramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, ty: &str, label: Option<&str>) -> WireEnd {
        let i = self.d.inputs.len();
        self.d.inputs.push(ty.to_string());
        WireEnd { src: Endpoint::Boundary(i), ty: ty.to_string(), label: label.map(str::to_string) }
    }

    /// Add a node fed by `inputs`; returns its output ends.
    pub fn node(&mut self, kind: NodeKind, inputs: Vec<WireEnd>, outputs: Vec<String>, tag: Option<String>) -> Vec<WireEnd> {
        let id = self.d.nodes.len();
        let in_types = inputs.iter().map(|e| e.ty.clone()).collect();
        for (p, e) in inputs.into_iter().enumerate() {
            self.d.wires.push(Wire { src: e.src, dst: Endpoint::Port(id, p), ty: e.ty, label: e.label });
        }
        let outs = outputs
            .iter()
            .enumerate()
            .map(|(p, t)| WireEnd { src: Endpoint::Port(id, p), ty: t.clone(), label: None })
            .collect();
        self.d.nodes.push(Node { kind, inputs: in_types, outputs, tag });
        outs
    }

    pub fn finish(mut self, outputs: Vec<WireEnd>) -> Diagram {
        for (j, e) in outputs.into_iter().enumerate() {
            self.d.outputs.push(e.ty.clone());
            self.d.wires.push(Wire { src: e.src, dst: Endpoint::Boundary(j), ty: e.ty, label: e.label });
        }
        self.d
    }
}

impl WireEnd {
    pub fn labeled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn identity_composes_to_identity() {
        let id = Diagram::identity(&s(&["A", "B"]));
        let d = id.then(&id).unwrap();
        assert_eq!(d, id);
        assert_eq!(d.boundary().inputs, s(&["A", "B"]));
    }

    #[test]
    fn tensor_offsets_boundary() {
        let a = Diagram::identity(&s(&["A"]));
        let b = Diagram::identity(&s(&["B"]));
        let d = a.tensor(&b);
        assert_eq!(d.wires[1].src, Endpoint::Boundary(1));
        assert_eq!(d.wires[1].dst, Endpoint::Boundary(1));
    }

    #[test]
    fn builder_wires_ports() {
        let mut b = DiagramBuilder::new();
        let x = b.input("D", None);
        let outs = b.node(NodeKind::Delta("D".into()), vec![x], s(&["D", "D"]), None);
        let d = b.finish(outs);
        assert_eq!(d.nodes.len(), 1);
        assert_eq!(d.wires.len(), 3);
        assert_eq!(d.outputs, s(&["D", "D"]));
        assert_eq!(d.topo_order(), Some(vec![0]));
    }
}
