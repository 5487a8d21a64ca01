//! Bidirectional best-first proof search over normal forms.

use super::normal::normalized;
use super::proof::{normal_step, Proof, Relation, Step};
use super::rules::{Dir, RuleKind, RuleSet};
use super::{Budget, Outcome, RewriteError};
use crate::diagram::hyper::{iso, Hyper, Leg};
use crate::diagram::Diagram;
use crate::signature::Signature;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::time::Instant;

#[derive(Clone, Copy)]
struct Move {
    rule: usize,
    dir: Dir,
}

struct Entry {
    h: Hyper,
    parent: Option<usize>,
    via: Option<Move>,
    depth: usize,
}

struct Side {
    entries: Vec<Entry>,
    buckets: HashMap<u64, Vec<usize>>,
    queue: BinaryHeap<Reverse<(usize, usize)>>,
    moves: Vec<Move>,
}

impl Side {
    fn new(root: Hyper, moves: Vec<Move>) -> Side {
        let mut s = Side { entries: vec![], buckets: HashMap::new(), queue: BinaryHeap::new(), moves };
        s.insert(root, None, None, 0, 0);
        s
    }

    fn find(&self, h: &Hyper, hash: u64) -> Option<usize> {
        self.buckets.get(&hash)?.iter().copied().find(|&i| iso(&self.entries[i].h, h))
    }

    fn insert(&mut self, h: Hyper, parent: Option<usize>, via: Option<Move>, depth: usize, prio: usize) -> usize {
        let i = self.entries.len();
        self.buckets.entry(h.wl_hash()).or_default().push(i);
        self.entries.push(Entry { h, parent, via, depth });
        self.queue.push(Reverse((prio, i)));
        i
    }

    fn path(&self, mut i: usize) -> Vec<usize> {
        let mut p = vec![i];
        while let Some(j) = self.entries[i].parent {
            p.push(j);
            i = j;
        }
        p.reverse();
        p
    }
}

/// Multiset of (type, sources, sinks) of every net that is not a plain wire.
fn spider_sig(h: &Hyper) -> BTreeMap<(String, usize, usize), usize> {
    let mut m = BTreeMap::new();
    for (n, ls) in h.legs().iter().enumerate() {
        let src = ls.iter().filter(|l| l.is_source()).count();
        let snk = ls.len() - src;
        if (src, snk) != (1, 1) || ls.iter().all(|l: &Leg| l.is_boundary()) {
            *m.entry((h.nets[n].clone(), src, snk)).or_insert(0) += 1;
        }
    }
    m
}

fn l1<K: Ord>(a: &BTreeMap<K, usize>, b: &BTreeMap<K, usize>) -> usize {
    let mut d = 0;
    for (k, &x) in a {
        d += x.abs_diff(b.get(k).copied().unwrap_or(0));
    }
    for (k, &y) in b {
        if !a.contains_key(k) {
            d += y;
        }
    }
    d
}

struct Goal {
    kinds: BTreeMap<crate::diagram::hyper::HKind, usize>,
    nets: usize,
    spiders: BTreeMap<(String, usize, usize), usize>,
}

impl Goal {
    fn of(h: &Hyper) -> Goal {
        Goal {
            kinds: h.kind_counts().into_iter().map(|(k, v)| (k.clone(), v)).collect(),
            nets: h.nets.len(),
            spiders: spider_sig(h),
        }
    }

    fn distance(&self, h: &Hyper) -> usize {
        let kinds: BTreeMap<_, _> = h.kind_counts().into_iter().map(|(k, v)| (k.clone(), v)).collect();
        l1(&self.kinds, &kinds) + self.nets.abs_diff(h.nets.len()) + l1(&self.spiders, &spider_sig(h))
    }
}

pub(crate) fn search(d1: &Diagram, d2: &Diagram, rel: Relation, budget: &Budget, sig: &Signature) -> Result<Outcome, RewriteError> {
    if d1.boundary() != d2.boundary() {
        return Err(RewriteError::BoundaryMismatch { lhs: d1.boundary(), rhs: d2.boundary() });
    }
    let rules = RuleSet::for_signature(sig)?;
    let data: HashSet<String> = sig.data_objects().map(|o| o.name.clone()).collect();
    let n1 = normalized(d1).ok_or(RewriteError::Malformed)?;
    let n2 = normalized(d2).ok_or(RewriteError::Malformed)?;
    let proof = |steps| Outcome::Proved(Proof { relation: rel, steps, start: d1.clone(), end: d2.clone() });
    if iso(&n1, &n2) {
        return Ok(proof(vec![]));
    }

    let mut order: Vec<usize> = (0..rules.rules.len()).filter(|&i| rules.rules[i].searchable()).collect();
    order.sort_by(|&a, &b| rules.rules[a].name.cmp(&rules.rules[b].name));
    let mut fwd_moves = Vec::new();
    let mut bwd_moves = Vec::new();
    for &i in &order {
        let r = &rules.rules[i];
        match (r.kind, rel) {
            (RuleKind::Equal, _) => {
                for d in [Dir::L2R, Dir::R2L] {
                    if r.norm_dirs.contains(&d) {
                        fwd_moves.push(Move { rule: i, dir: d });
                        bwd_moves.push(Move { rule: i, dir: d });
                    }
                }
            }
            (RuleKind::Leq, Relation::Leq) => {
                if r.split.is_some() || r.norm_dirs.contains(&Dir::L2R) {
                    fwd_moves.push(Move { rule: i, dir: Dir::L2R });
                }
                // predecessors under a leq rule come from matching its right side
                if r.split.is_none() && r.norm_dirs.contains(&Dir::R2L) {
                    bwd_moves.push(Move { rule: i, dir: Dir::R2L });
                }
            }
            (RuleKind::Leq, Relation::Equal) => {}
        }
    }
    let (g1, g2) = (Goal::of(&n1), Goal::of(&n2));
    let mut sides = [Side::new(n1, fwd_moves), Side::new(n2, bwd_moves)];
    let started = Instant::now();
    let apply = |h: &Hyper, m: &Move| -> Vec<Hyper> {
        let r = &rules.rules[m.rule];
        if let Some(ty) = &r.split {
            return super::matcher::split_all(h, ty, super::SPLIT_MAX_LEGS);
        }
        let (l, rr) = r.norm_sides(m.dir).unwrap();
        super::matcher::rewrite_all(h, l, rr, super::matcher::Mode::Normal, &data)
    };
    let meet: (usize, usize);
    let mut turn = 0usize;
    'outer: loop {
        let total = sides[0].entries.len() + sides[1].entries.len();
        if total >= budget.max_states || started.elapsed() >= budget.timeout {
            return Ok(Outcome::Unknown { states: total });
        }
        let s = turn % 2;
        turn += 1;
        let Some(Reverse((_, cur))) = sides[s].queue.pop() else {
            if sides[1 - s].queue.is_empty() {
                return Ok(Outcome::Unknown { states: total });
            }
            continue;
        };
        let state = sides[s].entries[cur].h.clone();
        let depth = sides[s].entries[cur].depth;
        let moves = sides[s].moves.clone();
        let succ: Vec<Vec<Hyper>> = budget.exec.map(&moves, |m| {
            let mut out = apply(&state, m);
            if s == 1 {
                // keep predecessors from which the forward step really reaches `state`
                let fm = Move { rule: m.rule, dir: if rules.rules[m.rule].kind == RuleKind::Leq { Dir::L2R } else { m.dir.flip() } };
                out.retain(|p| apply(p, &fm).iter().any(|q| iso(q, &state)));
            }
            out
        });
        let goal = if s == 0 { &g2 } else { &g1 };
        for (m, hs) in moves.iter().zip(succ) {
            for h in hs {
                let hash = h.wl_hash();
                if sides[s].find(&h, hash).is_some() {
                    continue;
                }
                let other = sides[1 - s].find(&h, hash);
                let prio = goal.distance(&h) * 2 + depth + 1;
                let i = sides[s].insert(h, Some(cur), Some(*m), depth + 1, prio);
                if let Some(j) = other {
                    meet = if s == 0 { (i, j) } else { (j, i) };
                    break 'outer;
                }
            }
        }
    }
    let (fi, bi) = meet;
    let rules_ref = &rules;
    // Chain of (rule, forward dir, target state).
    let mut chain: Vec<(usize, Dir, Hyper)> = Vec::new();
    let fp = sides[0].path(fi);
    for w in fp.windows(2) {
        let e = &sides[0].entries[w[1]];
        let m = e.via.unwrap();
        chain.push((m.rule, m.dir, e.h.clone()));
    }
    let mut bp = sides[1].path(bi);
    bp.reverse();
    for w in bp.windows(2) {
        let e = &sides[1].entries[w[0]];
        let m = e.via.unwrap();
        let dir = if rules_ref.rules[m.rule].kind == RuleKind::Leq { Dir::L2R } else { m.dir.flip() };
        chain.push((m.rule, dir, sides[1].entries[w[1]].h.clone()));
    }
    let mut cur = normalized(d1).unwrap();
    let mut steps = Vec::new();
    for (rule, dir, target) in chain {
        let name = &rules.rules[rule].name;
        let results = normal_step(&rules, &data, &cur, name, dir, rel)?;
        let at = budget.exec.position(&results, |r| iso(r, &target)).ok_or(RewriteError::ReplayMismatch)?;
        steps.push(Step { rule: name.clone(), at, dir });
        cur = results.into_iter().nth(at).unwrap();
    }
    Ok(proof(steps))
}
