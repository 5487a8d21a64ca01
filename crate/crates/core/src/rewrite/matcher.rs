//! Subdiagram matching and replacement on net forms.
//!
//! Pattern nodes are matched injectively. A pattern net that touches the
//! pattern boundary may map onto a larger target net; one that does not must
//! map onto a net with exactly the same legs. In normal mode several bounded
//! data nets may land on one target net, since spiders absorb copying and
//! joining around the match.

use super::normal::normalize;
use crate::diagram::hyper::{iso, HKind, HNode, Hyper, Leg, UnionFind};
use std::collections::HashSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Port graphs with plain wires; used for user-directed rewriting.
    Raw,
    /// Full normal forms; used by proof search.
    Normal,
}

fn only_boundary(ls: &[Leg]) -> bool {
    ls.iter().all(|l| l.is_boundary())
}

/// Every net of `from` without node legs has a twin in `to` with the same
/// boundary legs. Without this the rule cannot say where such a net goes.
pub(crate) fn free_nets_compatible(from: &Hyper, to: &Hyper) -> bool {
    let (lf, lt) = (from.legs(), to.legs());
    lf.iter().filter(|ls| only_boundary(ls)).all(|ls| lt.iter().any(|t| t == ls))
}

struct Pattern<'a> {
    l: &'a Hyper,
    legs: Vec<Vec<Leg>>,
    free: Vec<bool>,
    bounded: Vec<bool>,
    order: Vec<usize>,
    /// Gammas whose entity input comes straight from the boundary; the
    /// target Gamma may be split so that a copy of it stays behind.
    keepable: Vec<usize>,
    skip_net: Vec<bool>,
}

impl<'a> Pattern<'a> {
    fn new(l: &'a Hyper, mode: Mode) -> Self {
        let legs = l.legs();
        let free: Vec<bool> = legs.iter().map(|ls| only_boundary(ls)).collect();
        let bounded: Vec<bool> = legs.iter().map(|ls| ls.iter().any(|x| x.is_boundary())).collect();
        let mut order = Vec::new();
        let mut placed = vec![false; l.nodes.len()];
        while order.len() < l.nodes.len() {
            let touches = |k: usize| {
                order.iter().any(|&o: &usize| {
                    let a = &l.nodes[o];
                    let b = &l.nodes[k];
                    a.ins.iter().chain(&a.outs).any(|n| b.ins.contains(n) || b.outs.contains(n))
                })
            };
            let next = (0..l.nodes.len())
                .find(|&k| !placed[k] && touches(k))
                .or_else(|| (0..l.nodes.len()).find(|&k| !placed[k]))
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let mut keepable = Vec::new();
        let mut skip_net = vec![false; l.nets.len()];
        if mode == Mode::Normal {
            for (k, n) in l.nodes.iter().enumerate() {
                if let HKind::Gamma(_) = n.kind {
                    let x = n.ins[0];
                    if legs[x].len() == 2 && legs[x].iter().any(|g| matches!(g, Leg::In(_))) {
                        keepable.push(k);
                        skip_net[x] = true;
                    }
                }
            }
        }
        Pattern { l, legs, free, bounded, order, keepable, skip_net }
    }
}

struct Search<'a> {
    p: &'a Pattern<'a>,
    t: &'a Hyper,
    data: &'a HashSet<String>,
    mode: Mode,
    node_map: Vec<Option<usize>>,
    used: Vec<bool>,
    net_map: Vec<Option<usize>>,
    net_inv: Vec<Option<usize>>,
    trail: Vec<usize>,
    found: Vec<(Vec<usize>, Vec<Option<usize>>)>,
}

impl Search<'_> {
    fn injective(&self, ty: &str) -> bool {
        self.mode == Mode::Raw || !self.data.contains(ty)
    }

    fn map_net(&mut self, x: usize, y: usize) -> bool {
        if self.p.skip_net[x] {
            return true;
        }
        if let Some(y2) = self.net_map[x] {
            return y2 == y;
        }
        if self.p.l.nets[x] != self.t.nets[y] {
            return false;
        }
        if self.injective(&self.t.nets[y]) {
            if self.net_inv[y].is_some() {
                return false;
            }
            self.net_inv[y] = Some(x);
        }
        self.net_map[x] = Some(y);
        self.trail.push(x);
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().unwrap();
            let y = self.net_map[x].take().unwrap();
            if self.net_inv[y] == Some(x) {
                self.net_inv[y] = None;
            }
        }
    }

    fn run(&mut self, depth: usize) {
        if depth == self.p.order.len() {
            let nm = self.node_map.iter().map(|c| c.unwrap()).collect();
            self.found.push((nm, self.net_map.clone()));
            return;
        }
        let k = self.p.order[depth];
        let na = &self.p.l.nodes[k];
        for c in 0..self.t.nodes.len() {
            let nb = &self.t.nodes[c];
            if self.used[c] || nb.kind != na.kind || nb.ins.len() != na.ins.len() || nb.outs.len() != na.outs.len() {
                continue;
            }
            let mark = self.trail.len();
            let ok = na.ins.iter().zip(&nb.ins).chain(na.outs.iter().zip(&nb.outs)).all(|(&x, &y)| self.map_net(x, y));
            if ok {
                self.node_map[k] = Some(c);
                self.used[c] = true;
                self.run(depth + 1);
                self.node_map[k] = None;
                self.used[c] = false;
            }
            self.undo(mark);
        }
    }
}

/// Split target Gamma `c` into a residual Gamma feeding it; both write the
/// same data net.
fn split_gamma(t: &mut Hyper, c: usize) -> usize {
    let ty = t.nets[t.nodes[c].ins[0]].clone();
    let b = t.add_net(&ty);
    let node = &t.nodes[c];
    let residual = HNode { kind: node.kind.clone(), ins: vec![node.ins[0]], outs: vec![b, node.outs[1]], tag: node.tag.clone() };
    t.nodes[c].ins[0] = b;
    t.nodes.push(residual);
    b
}

fn nets_ok(p: &Pattern, t: &Hyper, node_map: &[usize], net_map: &[Option<usize>], data: &HashSet<String>, mode: Mode) -> bool {
    let legs = t.legs();
    let mut matched = vec![false; t.nodes.len()];
    for &c in node_map {
        matched[c] = true;
    }
    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); t.nets.len()];
    for (x, y) in net_map.iter().enumerate() {
        if let Some(y) = y {
            pre[*y].push(x);
        }
    }
    for (y, xs) in pre.iter().enumerate() {
        if xs.is_empty() {
            continue;
        }
        let rest: Vec<Leg> = legs[y].iter().copied().filter(|l| l.node().is_none_or(|n| !matched[n])).collect();
        if xs.iter().any(|&x| !p.bounded[x]) {
            if xs.len() != 1 || !rest.is_empty() {
                return false;
            }
            continue;
        }
        if mode == Mode::Raw || !data.contains(&t.nets[y]) {
            let x = xs[0];
            let nb = p.legs[x].iter().filter(|l| l.is_boundary()).count();
            if xs.len() != 1 || nb != 1 || rest.len() != 1 {
                return false;
            }
            continue;
        }
        let sources = rest.iter().filter(|l| l.is_source()).count();
        let pattern_outs: usize = xs.iter().map(|&x| p.legs[x].iter().filter(|l| matches!(l, Leg::Out(_))).count()).sum();
        if sources + pattern_outs == 0 {
            return false;
        }
    }
    true
}

fn replace(t: &Hyper, l: &Hyper, r: &Hyper, p: &Pattern, node_map: &[usize], net_map: &[Option<usize>]) -> Hyper {
    let mut out = t.clone();
    let mut removed = vec![false; out.nodes.len()];
    for &c in node_map {
        removed[c] = true;
    }
    let off = out.nets.len();
    out.nets.extend(r.nets.iter().cloned());
    for n in &r.nodes {
        out.nodes.push(HNode {
            kind: n.kind.clone(),
            ins: n.ins.iter().map(|x| x + off).collect(),
            outs: n.outs.iter().map(|x| x + off).collect(),
            tag: n.tag.clone(),
        });
    }
    let mut uf = UnionFind::new(out.nets.len());
    let pairs = l.inputs.iter().zip(&r.inputs).chain(l.outputs.iter().zip(&r.outputs));
    for (&lx, &rx) in pairs {
        if p.free[lx] {
            continue;
        }
        uf.union(net_map[lx].expect("bounded pattern net is mapped"), rx + off);
    }
    // Free nets pass through: keep the target's own boundary nets.
    out.rebuild(&mut uf, &removed);
    out
}

fn plain_wires(h: &Hyper) -> bool {
    h.legs().iter().all(|ls| ls.len() == 2 && ls.iter().filter(|l| l.is_source()).count() == 1)
}

fn push_unique(results: &mut Vec<Hyper>, hashes: &mut Vec<u64>, h: Hyper) {
    let k = h.wl_hash();
    if hashes.iter().zip(results.iter()).any(|(&hk, r)| hk == k && iso(r, &h)) {
        return;
    }
    hashes.push(k);
    results.push(h);
}

/// All results of replacing an occurrence of `l` in `t` by `r`, without
/// duplicates up to isomorphism, in a deterministic order.
pub(crate) fn rewrite_all(t: &Hyper, l: &Hyper, r: &Hyper, mode: Mode, data: &HashSet<String>) -> Vec<Hyper> {
    if l.nodes.is_empty() || !free_nets_compatible(l, r) {
        return vec![];
    }
    let p = Pattern::new(l, mode);
    let mut s = Search {
        p: &p,
        t,
        data,
        mode,
        node_map: vec![None; l.nodes.len()],
        used: vec![false; t.nodes.len()],
        net_map: vec![None; l.nets.len()],
        net_inv: vec![None; t.nets.len()],
        trail: vec![],
        found: vec![],
    };
    s.run(0);
    let found = std::mem::take(&mut s.found);
    let wires_only = mode == Mode::Raw && plain_wires(t);
    let mut results = Vec::new();
    let mut hashes = Vec::new();
    for (node_map, net_map) in found {
        for mask in 0u32..(1 << p.keepable.len()) {
            let mut tt = t.clone();
            let mut nm = net_map.clone();
            for (b, &k) in p.keepable.iter().enumerate() {
                let c = node_map[k];
                let x = l.nodes[k].ins[0];
                nm[x] = Some(if mask & (1 << b) != 0 { split_gamma(&mut tt, c) } else { tt.nodes[c].ins[0] });
            }
            // Keepable entity nets were skipped during search; recheck injectivity.
            if !nets_ok(&p, &tt, &node_map, &nm, data, mode) {
                continue;
            }
            let mut out = replace(&tt, l, r, &p, &node_map, &nm);
            let ok = match mode {
                Mode::Normal => {
                    normalize(&mut out);
                    out.realizable()
                }
                Mode::Raw if wires_only => plain_wires(&out) && out.acyclic(),
                Mode::Raw => out.realizable(),
            };
            if ok {
                push_unique(&mut results, &mut hashes, out);
            }
        }
    }
    results
}

/// Split moves for `well_behaved[D]`: a data net of type `ty` is cut in two,
/// each part keeping at least one source.
pub(crate) fn split_all(t: &Hyper, ty: &str, max_legs: usize) -> Vec<Hyper> {
    let legs = t.legs();
    let mut results = Vec::new();
    let mut hashes = Vec::new();
    for (y, ls) in legs.iter().enumerate() {
        if t.nets[y] != ty || ls.len() > max_legs {
            continue;
        }
        let srcs: Vec<Leg> = ls.iter().copied().filter(|l| l.is_source()).collect();
        let snks: Vec<Leg> = ls.iter().copied().filter(|l| !l.is_source()).collect();
        if srcs.len() < 2 {
            continue;
        }
        // srcs[0] always stays in the first part
        for sm in 0u32..(1 << (srcs.len() - 1)) {
            if sm == (1 << (srcs.len() - 1)) - 1 {
                continue;
            }
            let moved_src = |i: usize| i > 0 && sm & (1 << (i - 1)) == 0;
            for km in 0u32..(1 << snks.len()) {
                let mut h = t.clone();
                let z = h.add_net(ty);
                let mut moved: Vec<Leg> = (0..srcs.len()).filter(|&i| moved_src(i)).map(|i| srcs[i]).collect();
                moved.extend((0..snks.len()).filter(|&i| km & (1 << i) != 0).map(|i| snks[i]));
                for leg in moved {
                    match leg {
                        Leg::In(i) => h.inputs[i] = z,
                        Leg::Out(j) => h.outputs[j] = z,
                        Leg::NodeOut(n, p) => h.nodes[n].outs[p] = z,
                        Leg::NodeIn(n, p) => h.nodes[n].ins[p] = z,
                    }
                }
                let mut uf = UnionFind::new(h.nets.len());
                h.rebuild(&mut uf, &[]);
                normalize(&mut h);
                if h.realizable() {
                    push_unique(&mut results, &mut hashes, h);
                }
            }
        }
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::build_diagram;
    use crate::rewrite::normal::normalized;
    use crate::signature::parse_signature;
    use crate::term::parse_term;

    const SIG: &str = "data D\nentity M\nattr a : M -> D\ngen f : D -> D\ngen g : D -> D\ngen h : M -> M\n";

    fn raw(s: &str) -> Hyper {
        let sig = parse_signature(SIG).unwrap();
        Hyper::from_diagram(&build_diagram(&parse_term(s).unwrap(), &sig).unwrap()).unwrap()
    }

    fn norm(s: &str) -> Hyper {
        let sig = parse_signature(SIG).unwrap();
        normalized(&build_diagram(&parse_term(s).unwrap(), &sig).unwrap()).unwrap()
    }

    fn data() -> HashSet<String> {
        ["D".to_string()].into_iter().collect()
    }

    #[test]
    fn raw_rewrite_inside_context() {
        let t = raw("f ; f ; g");
        let out = rewrite_all(&t, &raw("f ; f"), &raw("g"), Mode::Raw, &data());
        assert_eq!(out.len(), 1);
        assert!(iso(&out[0], &raw("g ; g")));
        // two distinct occurrences of f
        let out = rewrite_all(&t, &raw("f"), &raw("g"), Mode::Raw, &data());
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn internal_nets_must_match_exactly() {
        // the wire between the two f's also feeds a copy, so f;f is not a subdiagram
        let t = norm("f ; delta[D] ; (f * id[D])");
        assert!(rewrite_all(&t, &norm("f ; f"), &norm("g"), Mode::Normal, &data()).is_empty());
    }

    #[test]
    fn bounded_nets_absorb_copies() {
        let t = norm("delta[D] ; (f * g)");
        let out = rewrite_all(&t, &norm("f"), &norm("g"), Mode::Normal, &data());
        assert_eq!(out.len(), 1);
        assert!(iso(&out[0], &norm("delta[D] ; (g * g)")));
    }

    #[test]
    fn keep_leaves_a_reader_behind() {
        // Pattern consumes the entity and its datum; the datum is also used elsewhere.
        let t = norm("get[a] ; (h * f)");
        let lhs = norm("get[a] ; (h * id[D])");
        let rhs = norm("h ; get[a]");
        let out = rewrite_all(&t, &lhs, &rhs, Mode::Normal, &data());
        assert!(out.iter().any(|o| iso(o, &norm("get[a] ; (h * id[D]) ; (get[a] * id[D]) ; (id[M] * mu[D]) ; (id[M] * f)"))));
    }

    #[test]
    fn split_cuts_a_join() {
        let t = norm("mu[D] ; delta[D]");
        let out = split_all(&t, "D", 8);
        assert!(out.iter().any(|o| iso(o, &norm("id[D] * id[D]"))));
        assert!(out.iter().all(|o| o.realizable()));
    }

    #[test]
    fn free_nets_need_a_twin() {
        assert!(free_nets_compatible(&norm("id[D] * f"), &norm("id[D] * g")));
        assert!(!free_nets_compatible(&norm("id[D] * f"), &norm("swap[D,D] ; (f * id[D])")));
    }
}
