//! The canonical partial-function model: every object is a finite set
//! `{0..n}`, `delta` copies, `eps` discards, and `mu` is defined only on
//! equal pairs.

use attrcat::diagram::{Diagram, Endpoint, NodeKind};
use std::collections::BTreeMap;

/// `gamma(m) = Some((m', d))`, or `None` where undefined.
pub type GammaTable = Vec<Option<(usize, usize)>>;
/// `phi[m][d]`.
pub type PhiTable = Vec<Vec<Option<usize>>>;
pub type GenFn = Box<dyn Fn(&[usize]) -> Option<Vec<usize>>>;

#[derive(Default)]
pub struct FiniteModel {
    pub sizes: BTreeMap<String, usize>,
    pub gamma: BTreeMap<String, GammaTable>,
    pub phi: BTreeMap<String, PhiTable>,
    pub gens: BTreeMap<String, GenFn>,
}

impl FiniteModel {
    pub fn with_sizes(sizes: &[(&str, usize)]) -> FiniteModel {
        FiniteModel { sizes: sizes.iter().map(|(t, n)| (t.to_string(), *n)).collect(), ..Default::default() }
    }

    fn node(&self, kind: &NodeKind, args: &[usize], outs: usize) -> Option<Vec<usize>> {
        match kind {
            NodeKind::Delta(_) => Some(vec![args[0], args[0]]),
            NodeKind::Eps(_) => Some(vec![]),
            NodeKind::Mu(_) => (args[0] == args[1]).then(|| vec![args[0]]),
            NodeKind::Spider(_) => {
                let v = *args.first().expect("spider without inputs");
                args.iter().all(|&a| a == v).then(|| vec![v; outs])
            }
            NodeKind::Gamma(a) => self.gamma[a][args[0]].map(|(m, d)| vec![m, d]),
            NodeKind::Phi(a) => self.phi[a][args[0]][args[1]].map(|m| vec![m]),
            NodeKind::Generator(g) => self.gens[g](args),
        }
    }

    /// Outputs of `d` at `inputs`, `None` where undefined. Nodes fire as soon
    /// as all their inputs are known, so fused spiders need no global order.
    pub fn eval(&self, d: &Diagram, inputs: &[usize]) -> Option<Vec<usize>> {
        let mut val: Vec<Option<usize>> = vec![None; d.wires.len()];
        for (k, w) in d.wires.iter().enumerate() {
            if let Endpoint::Boundary(i) = w.src {
                val[k] = Some(inputs[i]);
            }
        }
        let into = |n: usize, p: usize| d.wires.iter().position(|w| w.dst == Endpoint::Port(n, p)).unwrap();
        let from = |n: usize, p: usize| d.wires.iter().position(|w| w.src == Endpoint::Port(n, p)).unwrap();
        let mut done = vec![false; d.nodes.len()];
        loop {
            let mut progress = false;
            for (n, node) in d.nodes.iter().enumerate() {
                if done[n] {
                    continue;
                }
                let args: Option<Vec<usize>> = (0..node.inputs.len()).map(|p| val[into(n, p)]).collect();
                let Some(args) = args else { continue };
                let outs = self.node(&node.kind, &args, node.outputs.len())?;
                for (p, v) in outs.into_iter().enumerate() {
                    val[from(n, p)] = Some(v);
                }
                done[n] = true;
                progress = true;
            }
            if !progress {
                break;
            }
        }
        assert!(done.iter().all(|&b| b), "diagram is not evaluable");
        (0..d.outputs.len())
            .map(|j| {
                let k = d.wires.iter().position(|w| w.dst == Endpoint::Boundary(j)).unwrap();
                val[k]
            })
            .collect::<Option<Vec<usize>>>()
            .or(None)
    }

    /// Every input tuple for `d`, in lexicographic order.
    pub fn all_inputs(&self, types: &[String]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for t in types {
            let n = self.sizes[t];
            out = out.into_iter().flat_map(|p: Vec<usize>| (0..n).map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        out
    }

    /// The whole partial function `d` denotes.
    pub fn denotation(&self, d: &Diagram) -> Vec<Option<Vec<usize>>> {
        self.all_inputs(&d.inputs).iter().map(|p| self.eval(d, p)).collect()
    }
}

/// Every partial map `M -> M x D` that is a comonoid action:
/// `gamma ; (gamma x id) = gamma ; (id x delta)` and `gamma ; (id x eps) = id`.
pub fn comonoid_actions(m: usize, n: usize) -> Vec<GammaTable> {
    let choices: Vec<Option<(usize, usize)>> = std::iter::once(None).chain((0..m).flat_map(|a| (0..n).map(move |d| Some((a, d))))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let g: GammaTable = idx.iter().map(|&i| choices[i]).collect();
        let counit = (0..m).all(|x| g[x].map(|(y, _)| y) == Some(x));
        let coassoc = (0..m).all(|x| {
            let lhs = g[x].and_then(|(y, d)| g[y].map(|(z, e)| (z, e, d)));
            let rhs = g[x].map(|(y, d)| (y, d, d));
            lhs == rhs
        });
        if counit && coassoc {
            out.push(g);
        }
        let mut k = 0;
        while k < m {
            idx[k] += 1;
            if idx[k] < choices.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            return out;
        }
    }
}

/// `(gamma x id) ; (id x mu)` at `(x, d)`: read the attribute and join it with `d`.
pub fn frobenius_first(g: &GammaTable, x: usize, d: usize) -> Option<(usize, usize)> {
    g[x].and_then(|(y, e)| (e == d).then_some((y, e)))
}

/// `(id x delta) ; (phi x id)` at `(x, d)`.
pub fn frobenius_third(phi: &PhiTable, x: usize, d: usize) -> Option<(usize, usize)> {
    phi[x][d].map(|y| (y, d))
}

/// Every `phi : M x D -> M` with `frobenius_first = frobenius_third`,
/// found by trying all `(m + 1)^(m n)` partial maps.
pub fn phi_candidates(g: &GammaTable, m: usize, n: usize) -> Vec<PhiTable> {
    let cells = m * n;
    let mut idx = vec![0usize; cells];
    let mut out = Vec::new();
    loop {
        let phi: PhiTable = (0..m).map(|x| (0..n).map(|d| idx[x * n + d].checked_sub(1)).collect()).collect();
        if (0..m).all(|x| (0..n).all(|d| frobenius_first(g, x, d) == frobenius_third(&phi, x, d))) {
            out.push(phi);
        }
        let mut k = 0;
        while k < cells {
            idx[k] += 1;
            if idx[k] <= m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == cells {
            return out;
        }
    }
}

/// All data service action laws at every point; the first failure is named.
pub fn action_laws(g: &GammaTable, phi: &PhiTable, m: usize, n: usize) -> Result<(), String> {
    let mu = |a: usize, b: usize| (a == b).then_some(a);
    for x in 0..m {
        for d in 0..n {
            for e in 0..n {
                // phi acts through mu
                let lhs = phi[x][d].and_then(|y| phi[y][e]);
                let rhs = mu(d, e).and_then(|f| phi[x][f]);
                if lhs != rhs {
                    return Err(format!("semigroup action at ({}, {}, {})", x, d, e));
                }
            }
            let first = frobenius_first(g, x, d);
            let second = phi[x][d].and_then(|y| g[y]);
            let third = frobenius_third(phi, x, d);
            if first != second || first != third {
                return Err(format!("frobenius at ({}, {})", x, d));
            }
        }
        let coassoc = g[x].and_then(|(y, d)| g[y].map(|(z, e)| (z, e, d))) == g[x].map(|(y, d)| (y, d, d));
        if !coassoc || g[x].map(|(y, _)| y) != Some(x) {
            return Err(format!("comonoid action at {}", x));
        }
        if g[x].and_then(|(y, d)| phi[y][d]) != Some(x) {
            return Err(format!("special law at {}", x));
        }
    }
    Ok(())
}
