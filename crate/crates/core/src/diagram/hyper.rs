//! Net form of a diagram: wires that meet in a spider are one net.
//!
//! A net is an equality hyperedge with source legs (boundary inputs, node
//! outputs) and sink legs (node inputs, boundary outputs). Ordinary wires are
//! nets with one source and one sink. Rewriting works on this form.

use super::{Diagram, Endpoint, Node, NodeKind, Wire};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum HKind {
    Gen(String),
    Mu(String),
    Delta(String),
    Eps(String),
    Gamma(String),
    Phi(String),
}

impl HKind {
    pub(crate) fn is_data_primitive(&self) -> bool {
        matches!(self, HKind::Mu(_) | HKind::Delta(_) | HKind::Eps(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct HNode {
    pub kind: HKind,
    pub ins: Vec<usize>,
    pub outs: Vec<usize>,
    pub tag: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Hyper {
    pub nodes: Vec<HNode>,
    /// Type of each net.
    pub nets: Vec<String>,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Leg {
    In(usize),
    NodeOut(usize, usize),
    NodeIn(usize, usize),
    Out(usize),
}

impl Leg {
    pub(crate) fn is_source(self) -> bool {
        matches!(self, Leg::In(_) | Leg::NodeOut(..))
    }

    pub(crate) fn is_boundary(self) -> bool {
        matches!(self, Leg::In(_) | Leg::Out(_))
    }

    pub(crate) fn node(self) -> Option<usize> {
        match self {
            Leg::NodeOut(n, _) | Leg::NodeIn(n, _) => Some(n),
            _ => None,
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn grow(&mut self, n: usize) {
        while self.parent.len() < n {
            self.parent.push(self.parent.len());
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let n = self.parent[c];
            self.parent[c] = r;
            c = n;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn h64<T: Hash>(t: &T) -> u64 {
    let mut s = DefaultHasher::new();
    t.hash(&mut s);
    s.finish()
}

impl Hyper {
    /// Convert a well-formed diagram (every port on exactly one wire).
    /// Spider nodes dissolve into their nets; other nodes keep their kind.
    pub(crate) fn from_diagram(d: &Diagram) -> Option<Hyper> {
        let nw = d.wires.len();
        let mut uf = UnionFind::new(nw);
        let mut in_port: Vec<Vec<Option<usize>>> = d.nodes.iter().map(|n| vec![None; n.inputs.len()]).collect();
        let mut out_port: Vec<Vec<Option<usize>>> = d.nodes.iter().map(|n| vec![None; n.outputs.len()]).collect();
        let mut bin = vec![None; d.inputs.len()];
        let mut bout = vec![None; d.outputs.len()];
        for (w, wire) in d.wires.iter().enumerate() {
            let slot = match wire.src {
                Endpoint::Boundary(i) => bin.get_mut(i)?,
                Endpoint::Port(n, p) => out_port.get_mut(n)?.get_mut(p)?,
            };
            if slot.replace(w).is_some() {
                return None;
            }
            let slot = match wire.dst {
                Endpoint::Boundary(j) => bout.get_mut(j)?,
                Endpoint::Port(n, p) => in_port.get_mut(n)?.get_mut(p)?,
            };
            if slot.replace(w).is_some() {
                return None;
            }
        }
        if bin.iter().chain(&bout).any(Option::is_none)
            || in_port.iter().chain(&out_port).flatten().any(Option::is_none)
        {
            return None;
        }
        for (k, n) in d.nodes.iter().enumerate() {
            if let NodeKind::Spider(_) = n.kind {
                let ws: Vec<usize> = in_port[k].iter().chain(&out_port[k]).map(|w| w.unwrap()).collect();
                for w in ws.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        let mut h = Hyper::default();
        let mut net_of = vec![usize::MAX; nw];
        let mut id = |w: usize, h: &mut Hyper, uf: &mut UnionFind| {
            let r = uf.find(w);
            if net_of[r] == usize::MAX {
                net_of[r] = h.nets.len();
                h.nets.push(d.wires[w].ty.clone());
            }
            net_of[r]
        };
        for w in bin.iter().flatten() {
            let n = id(*w, &mut h, &mut uf);
            h.inputs.push(n);
        }
        for (k, n) in d.nodes.iter().enumerate() {
            let kind = match &n.kind {
                NodeKind::Spider(_) => continue,
                NodeKind::Generator(g) => HKind::Gen(g.clone()),
                NodeKind::Mu(x) => HKind::Mu(x.clone()),
                NodeKind::Delta(x) => HKind::Delta(x.clone()),
                NodeKind::Eps(x) => HKind::Eps(x.clone()),
                NodeKind::Gamma(x) => HKind::Gamma(x.clone()),
                NodeKind::Phi(x) => HKind::Phi(x.clone()),
            };
            let ins = in_port[k].iter().map(|w| id(w.unwrap(), &mut h, &mut uf)).collect();
            let outs = out_port[k].iter().map(|w| id(w.unwrap(), &mut h, &mut uf)).collect();
            h.nodes.push(HNode { kind, ins, outs, tag: n.tag.clone() });
        }
        for w in bout.iter().flatten() {
            let n = id(*w, &mut h, &mut uf);
            h.outputs.push(n);
        }
        Some(h)
    }

    /// Back to a port graph: one-source one-sink nets become wires, all other
    /// nets become spider nodes appended after the ordinary nodes.
    pub(crate) fn to_diagram(&self) -> Diagram {
        let legs = self.legs();
        let mut nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| {
                let kind = match &n.kind {
                    HKind::Gen(g) => NodeKind::Generator(g.clone()),
                    HKind::Mu(x) => NodeKind::Mu(x.clone()),
                    HKind::Delta(x) => NodeKind::Delta(x.clone()),
                    HKind::Eps(x) => NodeKind::Eps(x.clone()),
                    HKind::Gamma(x) => NodeKind::Gamma(x.clone()),
                    HKind::Phi(x) => NodeKind::Phi(x.clone()),
                };
                Node {
                    kind,
                    inputs: n.ins.iter().map(|&x| self.nets[x].clone()).collect(),
                    outputs: n.outs.iter().map(|&x| self.nets[x].clone()).collect(),
                    tag: n.tag.clone(),
                }
            })
            .collect();
        let src_ep = |l: Leg| match l {
            Leg::In(i) => Endpoint::Boundary(i),
            Leg::NodeOut(n, p) => Endpoint::Port(n, p),
            _ => unreachable!(),
        };
        let dst_ep = |l: Leg| match l {
            Leg::Out(j) => Endpoint::Boundary(j),
            Leg::NodeIn(n, p) => Endpoint::Port(n, p),
            _ => unreachable!(),
        };
        let mut wires = Vec::new();
        for (net, ls) in legs.iter().enumerate() {
            let ty = &self.nets[net];
            let srcs: Vec<Leg> = ls.iter().copied().filter(|l| l.is_source()).collect();
            let snks: Vec<Leg> = ls.iter().copied().filter(|l| !l.is_source()).collect();
            if srcs.len() == 1 && snks.len() == 1 {
                wires.push(Wire { src: src_ep(srcs[0]), dst: dst_ep(snks[0]), ty: ty.clone(), label: None });
                continue;
            }
            let k = nodes.len();
            nodes.push(Node {
                kind: NodeKind::Spider(ty.clone()),
                inputs: vec![ty.clone(); srcs.len()],
                outputs: vec![ty.clone(); snks.len()],
                tag: None,
            });
            for (p, s) in srcs.iter().enumerate() {
                wires.push(Wire { src: src_ep(*s), dst: Endpoint::Port(k, p), ty: ty.clone(), label: None });
            }
            for (p, s) in snks.iter().enumerate() {
                wires.push(Wire { src: Endpoint::Port(k, p), dst: dst_ep(*s), ty: ty.clone(), label: None });
            }
        }
        Diagram {
            nodes,
            wires,
            inputs: self.inputs.iter().map(|&n| self.nets[n].clone()).collect(),
            outputs: self.outputs.iter().map(|&n| self.nets[n].clone()).collect(),
        }
    }

    /// Legs of every net, sorted.
    pub(crate) fn legs(&self) -> Vec<Vec<Leg>> {
        let mut out = vec![Vec::new(); self.nets.len()];
        for (i, &n) in self.inputs.iter().enumerate() {
            out[n].push(Leg::In(i));
        }
        for (k, node) in self.nodes.iter().enumerate() {
            for (p, &n) in node.outs.iter().enumerate() {
                out[n].push(Leg::NodeOut(k, p));
            }
            for (p, &n) in node.ins.iter().enumerate() {
                out[n].push(Leg::NodeIn(k, p));
            }
        }
        for (j, &n) in self.outputs.iter().enumerate() {
            out[n].push(Leg::Out(j));
        }
        for l in &mut out {
            l.sort();
        }
        out
    }

    /// Redirect every net reference through `uf`, drop nodes marked in
    /// `removed`, and renumber nets in order of first use.
    pub(crate) fn rebuild(&mut self, uf: &mut UnionFind, removed: &[bool]) {
        uf.grow(self.nets.len());
        let mut map = vec![usize::MAX; self.nets.len()];
        let mut nets = Vec::new();
        let old = std::mem::take(&mut self.nets);
        let mut id = |n: usize, uf: &mut UnionFind| {
            let r = uf.find(n);
            if map[r] == usize::MAX {
                map[r] = nets.len();
                nets.push(old[r].clone());
            }
            map[r]
        };
        let inputs: Vec<usize> = self.inputs.iter().map(|&n| id(n, uf)).collect();
        let mut nodes = Vec::new();
        for (k, node) in self.nodes.iter().enumerate() {
            if removed.get(k).copied().unwrap_or(false) {
                continue;
            }
            nodes.push(HNode {
                kind: node.kind.clone(),
                ins: node.ins.iter().map(|&n| id(n, uf)).collect(),
                outs: node.outs.iter().map(|&n| id(n, uf)).collect(),
                tag: node.tag.clone(),
            });
        }
        let outputs: Vec<usize> = self.outputs.iter().map(|&n| id(n, uf)).collect();
        self.inputs = inputs;
        self.outputs = outputs;
        self.nodes = nodes;
        self.nets = nets;
    }

    pub(crate) fn add_net(&mut self, ty: &str) -> usize {
        self.nets.push(ty.to_string());
        self.nets.len() - 1
    }

    /// Spider fusion: delete every Mu/Delta/Eps node and merge its nets.
    pub(crate) fn fuse_data(&mut self) {
        let mut uf = UnionFind::new(self.nets.len());
        let mut removed = vec![false; self.nodes.len()];
        for (k, n) in self.nodes.iter().enumerate() {
            if n.kind.is_data_primitive() {
                removed[k] = true;
                let all: Vec<usize> = n.ins.iter().chain(&n.outs).copied().collect();
                for w in all.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        self.rebuild(&mut uf, &removed);
    }

    /// Evaluation order exists: nets become available from any one source,
    /// nodes fire once all their inputs are available.
    pub(crate) fn realizable(&self) -> bool {
        let mut avail = vec![false; self.nets.len()];
        for &n in &self.inputs {
            avail[n] = true;
        }
        let mut fired = vec![false; self.nodes.len()];
        loop {
            let mut progress = false;
            for (k, node) in self.nodes.iter().enumerate() {
                if !fired[k] && node.ins.iter().all(|&n| avail[n]) {
                    fired[k] = true;
                    progress = true;
                    for &n in &node.outs {
                        avail[n] = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        fired.iter().all(|&f| f) && avail.iter().all(|&a| a)
    }

    /// Plain acyclicity of the node graph (used for raw, spider-free forms).
    pub(crate) fn acyclic(&self) -> bool {
        self.to_diagram().topo_order().is_some()
    }

    /// Weisfeiler-Leman colours of nodes and nets.
    pub(crate) fn colors(&self) -> (Vec<u64>, Vec<u64>) {
        let legs = self.legs();
        let mut nc: Vec<u64> = self.nodes.iter().map(|n| h64(&(&n.kind, n.ins.len(), n.outs.len()))).collect();
        let mut ec: Vec<u64> = legs
            .iter()
            .enumerate()
            .map(|(i, ls)| {
                let bnd: Vec<Leg> = ls.iter().copied().filter(|l| l.is_boundary()).collect();
                let nsrc = ls.iter().filter(|l| l.is_source()).count();
                h64(&(&self.nets[i], bnd, nsrc, ls.len()))
            })
            .collect();
        for _ in 0..3 {
            nc = self
                .nodes
                .iter()
                .enumerate()
                .map(|(k, n)| {
                    let i: Vec<u64> = n.ins.iter().map(|&x| ec[x]).collect();
                    let o: Vec<u64> = n.outs.iter().map(|&x| ec[x]).collect();
                    h64(&(nc[k], i, o))
                })
                .collect();
            ec = legs
                .iter()
                .enumerate()
                .map(|(i, ls)| {
                    let mut sig: Vec<(u64, u8, usize)> = ls
                        .iter()
                        .filter_map(|l| match *l {
                            Leg::NodeOut(n, p) => Some((nc[n], 0, p)),
                            Leg::NodeIn(n, p) => Some((nc[n], 1, p)),
                            _ => None,
                        })
                        .collect();
                    sig.sort();
                    h64(&(ec[i], sig))
                })
                .collect();
        }
        (nc, ec)
    }

    /// Isomorphism-invariant hash.
    pub(crate) fn wl_hash(&self) -> u64 {
        let (nc, ec) = self.colors();
        let mut ns = nc.clone();
        ns.sort();
        let mut es = ec.clone();
        es.sort();
        let bi: Vec<u64> = self.inputs.iter().map(|&n| ec[n]).collect();
        let bo: Vec<u64> = self.outputs.iter().map(|&n| ec[n]).collect();
        h64(&(ns, es, bi, bo))
    }

    pub(crate) fn kind_counts(&self) -> std::collections::BTreeMap<&HKind, usize> {
        let mut m = std::collections::BTreeMap::new();
        for n in &self.nodes {
            *m.entry(&n.kind).or_insert(0) += 1;
        }
        m
    }
}

struct IsoState<'a> {
    a: &'a Hyper,
    b: &'a Hyper,
    ca: (Vec<u64>, Vec<u64>),
    cb: (Vec<u64>, Vec<u64>),
    node_map: Vec<Option<usize>>,
    node_used: Vec<bool>,
    net_map: Vec<Option<usize>>,
    net_inv: Vec<Option<usize>>,
    trail: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl IsoState<'_> {
    fn map_net(&mut self, x: usize, y: usize) -> bool {
        match (self.net_map[x], self.net_inv[y]) {
            (Some(y2), _) => y2 == y,
            (None, Some(_)) => false,
            (None, None) => {
                if self.a.nets[x] != self.b.nets[y] || self.ca.1[x] != self.cb.1[y] {
                    return false;
                }
                self.net_map[x] = Some(y);
                self.net_inv[y] = Some(x);
                self.trail.push(x);
                true
            }
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().unwrap();
            let y = self.net_map[x].take().unwrap();
            self.net_inv[y] = None;
        }
    }

    fn next_node(&self) -> Option<usize> {
        let unmapped = |k: &usize| self.node_map[*k].is_none();
        (0..self.a.nodes.len())
            .filter(unmapped)
            .find(|&k| self.adj[k].iter().any(|&n| self.net_map[n].is_some()))
            .or_else(|| (0..self.a.nodes.len()).find(unmapped))
    }

    fn search(&mut self) -> bool {
        let Some(k) = self.next_node() else {
            return self.net_map.iter().all(Option::is_some);
        };
        let na = &self.a.nodes[k];
        for c in 0..self.b.nodes.len() {
            if self.node_used[c] || self.ca.0[k] != self.cb.0[c] {
                continue;
            }
            let nb = &self.b.nodes[c];
            if nb.kind != na.kind || nb.ins.len() != na.ins.len() || nb.outs.len() != na.outs.len() {
                continue;
            }
            let mark = self.trail.len();
            let ok = na.ins.iter().zip(&nb.ins).chain(na.outs.iter().zip(&nb.outs)).all(|(&x, &y)| self.map_net(x, y));
            if ok {
                self.node_map[k] = Some(c);
                self.node_used[c] = true;
                if self.search() {
                    return true;
                }
                self.node_map[k] = None;
                self.node_used[c] = false;
            }
            self.undo(mark);
        }
        false
    }
}

/// Isomorphism of net forms respecting node kinds, port order and boundary
/// order. Net legs are unordered.
pub(crate) fn iso(a: &Hyper, b: &Hyper) -> bool {
    if a.nodes.len() != b.nodes.len()
        || a.nets.len() != b.nets.len()
        || a.inputs.len() != b.inputs.len()
        || a.outputs.len() != b.outputs.len()
    {
        return false;
    }
    let (ca, cb) = (a.colors(), b.colors());
    let mut sa = ca.0.clone();
    let mut sb = cb.0.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    let adj = a.nodes.iter().map(|n| n.ins.iter().chain(&n.outs).copied().collect()).collect();
    let mut st = IsoState {
        a,
        b,
        ca,
        cb,
        node_map: vec![None; a.nodes.len()],
        node_used: vec![false; b.nodes.len()],
        net_map: vec![None; a.nets.len()],
        net_inv: vec![None; b.nets.len()],
        trail: vec![],
        adj,
    };
    for i in 0..a.inputs.len() {
        if !st.map_net(a.inputs[i], b.inputs[i]) {
            return false;
        }
    }
    for j in 0..a.outputs.len() {
        if !st.map_net(a.outputs[j], b.outputs[j]) {
            return false;
        }
    }
    st.search()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::build_diagram;
    use crate::signature::parse_signature;
    use crate::term::parse_term;

    fn h(s: &str) -> Hyper {
        let sig = parse_signature("data D\nentity M\nattr a : M -> D\ngen f : D -> D").unwrap();
        Hyper::from_diagram(&build_diagram(&parse_term(s).unwrap(), &sig).unwrap()).unwrap()
    }

    #[test]
    fn roundtrip_preserves_shape() {
        let a = h("(delta[D] * id[D]) ; (id[D] * mu[D])");
        let d = a.to_diagram();
        let b = Hyper::from_diagram(&d).unwrap();
        assert!(iso(&a, &b));
    }

    #[test]
    fn fusion_identifies_frobenius_forms() {
        let mut a = h("(delta[D] * id[D]) ; (id[D] * mu[D])");
        let mut b = h("mu[D] ; delta[D]");
        assert!(!iso(&a, &b));
        a.fuse_data();
        b.fuse_data();
        assert!(iso(&a, &b));
        assert_eq!(a.nets.len(), 1);
    }

    #[test]
    fn iso_respects_boundary_order() {
        let a = h("delta[D]");
        let b = h("delta[D] ; swap[D,D]");
        assert!(!iso(&a, &b));
        assert!(iso(&a, &a.clone()));
    }

    #[test]
    fn feedback_is_realizable() {
        let mut a = h("delta[D] ; (f * id[D]) ; mu[D]");
        a.fuse_data();
        assert_eq!(a.nodes.len(), 1);
        assert!(a.realizable());
        assert!(!a.acyclic());
    }

    #[test]
    fn hash_is_invariant_under_node_order() {
        let a = h("(get[a] * f) ; (set[a] * id[D])");
        let mut b = a.clone();
        b.nodes.reverse();
        assert_eq!(a.wl_hash(), b.wl_hash());
        assert!(iso(&a, &b));
    }
}
