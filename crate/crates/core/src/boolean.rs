//! Finite free Boolean algebras over ground atoms.
//!
//! A proposition is the exact set of valuations satisfying it, stored as a
//! bitset over all `2^n` valuations. Valuation `v` assigns atom `i` the bit
//! `(v >> i) & 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Exhaustive valuation sets stay below 2 MiB per proposition.
pub const MAX_ATOMS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoolError {
    #[error("atom budget exceeded: {0} atoms (max {MAX_ATOMS})")]
    TooManyAtoms(usize),
    #[error("propositions are over different atom sets")]
    AtomSetMismatch,
    #[error("binding maps '{var}' of type {expected} to '{obj}' of type {found}")]
    BindingType { var: String, expected: String, obj: String, found: String },
    #[error("binding does not cover '{0}'")]
    Unbound(String),
    #[error("precondition {failed} of {action} does not hold")]
    Precondition { action: String, failed: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedPred {
    pub name: String,
    pub arg_types: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypedObj {
    pub name: String,
    pub ty: String,
}

impl TypedObj {
    pub fn new(name: &str, ty: &str) -> Self {
        TypedObj { name: name.into(), ty: ty.into() }
    }
}

#[derive(Clone, Debug)]
pub struct AtomSet {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl PartialEq for AtomSet {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for AtomSet {}

impl AtomSet {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Arc<AtomSet>, BoolError> {
        atoms.sort();
        atoms.dedup();
        if atoms.len() > MAX_ATOMS {
            return Err(BoolError::TooManyAtoms(atoms.len()));
        }
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Ok(Arc::new(AtomSet { atoms, index }))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.index.get(a).copied()
    }

    fn valuations(&self) -> u64 {
        1u64 << self.atoms.len()
    }
}

/// All type-respecting ground instances, in lexicographic order.
pub fn atoms_for(preds: &[TypedPred], objs: &[TypedObj]) -> Result<Arc<AtomSet>, BoolError> {
    let mut atoms = Vec::new();
    for p in preds {
        let choices: Vec<Vec<&TypedObj>> = p.arg_types.iter().map(|t| objs.iter().filter(|o| &o.ty == t).collect()).collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let total: usize = choices.iter().map(Vec::len).product();
        if atoms.len() + total > MAX_ATOMS {
            return Err(BoolError::TooManyAtoms(atoms.len() + total));
        }
        let mut idx = vec![0usize; choices.len()];
        'gen: loop {
            atoms.push(Atom { pred: p.name.clone(), args: idx.iter().zip(&choices).map(|(&i, c)| c[i].name.clone()).collect() });
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    continue 'gen;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    AtomSet::new(atoms)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    pub atoms: Arc<AtomSet>,
    pub bits: u32,
}

impl Valuation {
    pub fn empty(atoms: &Arc<AtomSet>) -> Valuation {
        Valuation { atoms: atoms.clone(), bits: 0 }
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn true_atoms(&self) -> Vec<&Atom> {
        (0..self.atoms.len()).filter(|&i| self.get(i)).map(|i| &self.atoms.atoms[i]).collect()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.true_atoms().iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", t.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposition {
    pub atoms: Arc<AtomSet>,
    models: Vec<u64>,
}

impl Proposition {
    fn filled(atoms: &Arc<AtomSet>, mut f: impl FnMut(u64) -> bool) -> Proposition {
        let n = atoms.valuations();
        let mut models = vec![0u64; n.div_ceil(64) as usize];
        for v in 0..n {
            if f(v) {
                models[(v / 64) as usize] |= 1 << (v % 64);
            }
        }
        Proposition { atoms: atoms.clone(), models }
    }

    pub fn top(atoms: &Arc<AtomSet>) -> Proposition {
        Self::filled(atoms, |_| true)
    }

    pub fn bot(atoms: &Arc<AtomSet>) -> Proposition {
        Self::filled(atoms, |_| false)
    }

    pub fn atom(atoms: &Arc<AtomSet>, i: usize) -> Proposition {
        Self::filled(atoms, |v| v >> i & 1 == 1)
    }

    pub fn literal(atoms: &Arc<AtomSet>, i: usize, value: bool) -> Proposition {
        Self::filled(atoms, |v| (v >> i & 1 == 1) == value)
    }

    /// Exactly the valuations satisfying `f`.
    pub fn from_fn(atoms: &Arc<AtomSet>, f: impl Fn(&Valuation) -> bool) -> Proposition {
        let mut s = Valuation::empty(atoms);
        Self::filled(atoms, |v| {
            s.bits = v as u32;
            f(&s)
        })
    }

    fn same(&self, o: &Proposition) -> Result<(), BoolError> {
        if Arc::ptr_eq(&self.atoms, &o.atoms) || self.atoms == o.atoms {
            Ok(())
        } else {
            Err(BoolError::AtomSetMismatch)
        }
    }

    fn zip(&self, o: &Proposition, f: impl Fn(u64, u64) -> u64) -> Result<Proposition, BoolError> {
        self.same(o)?;
        Ok(Proposition { atoms: self.atoms.clone(), models: self.models.iter().zip(&o.models).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn and(&self, o: &Proposition) -> Result<Proposition, BoolError> {
        self.zip(o, |a, b| a & b)
    }

    pub fn or(&self, o: &Proposition) -> Result<Proposition, BoolError> {
        self.zip(o, |a, b| a | b)
    }

    pub fn not(&self) -> Proposition {
        let mut p = self.clone();
        for w in &mut p.models {
            *w = !*w;
        }
        p.trim();
        p
    }

    // clear bits past 2^n when n < 6
    fn trim(&mut self) {
        let n = self.atoms.valuations();
        if n < 64 {
            self.models[0] &= (1u64 << n) - 1;
        }
    }

    pub fn holds(&self, v: u32) -> bool {
        self.models[(v / 64) as usize] >> (v % 64) & 1 == 1
    }

    pub fn is_bot(&self) -> bool {
        self.models.iter().all(|&w| w == 0)
    }

    pub fn is_top(&self) -> bool {
        self.not().is_bot()
    }

    pub fn count_models(&self) -> u64 {
        self.models.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Every model of `self` is a model of `q`.
    pub fn entails(&self, q: &Proposition) -> Result<bool, BoolError> {
        self.same(q)?;
        Ok(self.models.iter().zip(&q.models).all(|(&a, &b)| a & !b == 0))
    }

    /// `Some(true)` if `self` forces atom `i` true, `Some(false)` if it forces
    /// it false, `None` if neither (or if `self` is unsatisfiable).
    pub fn forced(&self, i: usize) -> Option<bool> {
        if self.is_bot() {
            return None;
        }
        let pos = Proposition::atom(&self.atoms, i);
        let with = self.and(&pos).unwrap();
        if with.is_bot() {
            return Some(false);
        }
        if with == *self {
            return Some(true);
        }
        None
    }

    /// Literal list when `self` is a conjunction of literals (true for ⊤).
    pub fn as_literal_conjunction(&self) -> Option<Vec<(usize, bool)>> {
        let lits: Vec<(usize, bool)> = (0..self.atoms.len()).filter_map(|i| self.forced(i).map(|v| (i, v))).collect();
        let mut cube = Proposition::top(&self.atoms);
        for &(i, v) in &lits {
            cube = cube.and(&Proposition::literal(&self.atoms, i, v)).unwrap();
        }
        (cube == *self).then_some(lits)
    }
}

pub fn entails(s: &Valuation, q: &Proposition) -> Result<bool, BoolError> {
    if !(Arc::ptr_eq(&s.atoms, &q.atoms) || s.atoms == q.atoms) {
        return Err(BoolError::AtomSetMismatch);
    }
    Ok(q.holds(s.bits))
}

pub fn prop_entails(p: &Proposition, q: &Proposition) -> Result<bool, BoolError> {
    p.entails(q)
}

/// Variable binding `X_a -> O`: variables are typed objects of the local atom set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub pairs: Vec<(TypedObj, TypedObj)>,
}

impl Binding {
    pub fn identity(objs: &[TypedObj]) -> Binding {
        Binding { pairs: objs.iter().map(|o| (o.clone(), o.clone())).collect() }
    }

    fn check(&self) -> Result<(), BoolError> {
        for (x, o) in &self.pairs {
            if x.ty != o.ty {
                return Err(BoolError::BindingType { var: x.name.clone(), expected: x.ty.clone(), obj: o.name.clone(), found: o.ty.clone() });
            }
        }
        Ok(())
    }

    fn image(&self, a: &Atom) -> Result<Atom, BoolError> {
        let args = a
            .args
            .iter()
            .map(|x| {
                self.pairs
                    .iter()
                    .find(|(v, _)| &v.name == x)
                    .map(|(_, o)| o.name.clone())
                    .ok_or_else(|| BoolError::Unbound(x.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Atom { pred: a.pred.clone(), args })
    }
}

/// `j^* s`: the local atom `p(x..)` takes the value of global `p(j(x)..)`.
/// Local atoms whose image is not a global atom read as false.
pub fn pullback_valuation(j: &Binding, local: &Arc<AtomSet>, s: &Valuation) -> Result<Valuation, BoolError> {
    j.check()?;
    let mut out = Valuation::empty(local);
    for (i, a) in local.atoms.iter().enumerate() {
        if let Some(g) = s.atoms.index_of(&j.image(a)?) {
            out.set(i, s.get(g));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateRule {
    /// Entailed-true atoms become true, entailed-false atoms false, the rest keep their value.
    #[default]
    Symmetric,
    /// Only atoms inconsistent with the post-condition are switched off.
    LiteralFlip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolAction {
    pub name: String,
    pub params: Vec<TypedObj>,
    pub atoms: Arc<AtomSet>,
    /// Named conjuncts of the precondition, checked in order.
    pub pre: Vec<(String, Proposition)>,
    pub post: Proposition,
    /// Atoms held at their current value while the post-condition is applied.
    pub frozen: Vec<bool>,
}

impl BoolAction {
    pub fn pre_prop(&self) -> Proposition {
        let mut p = Proposition::top(&self.atoms);
        for (_, q) in &self.pre {
            p = p.and(q).unwrap();
        }
        p
    }

    /// The post-condition together with the frozen atoms pinned to `s`.
    pub fn effective_post(&self, s: &Valuation) -> Proposition {
        let mut q = self.post.clone();
        for (i, &f) in self.frozen.iter().enumerate() {
            if f {
                q = q.and(&Proposition::literal(&self.atoms, i, s.get(i))).unwrap();
            }
        }
        q
    }
}

/// Minimal-modification update on the local atom set.
pub fn apply_action(a: &BoolAction, s: &Valuation, rule: UpdateRule) -> Result<Valuation, BoolError> {
    if !(Arc::ptr_eq(&s.atoms, &a.atoms) || *s.atoms == *a.atoms) {
        return Err(BoolError::AtomSetMismatch);
    }
    for (label, q) in &a.pre {
        if !q.holds(s.bits) {
            return Err(BoolError::Precondition { action: a.name.clone(), failed: label.clone() });
        }
    }
    let q = a.effective_post(s);
    let mut out = s.clone();
    for i in 0..a.atoms.len() {
        match (q.forced(i), rule) {
            (Some(v), UpdateRule::Symmetric) => out.set(i, v),
            (Some(false), UpdateRule::LiteralFlip) => out.set(i, false),
            _ => {}
        }
    }
    Ok(out)
}

/// Apply `a` through binding `j` and write the local result back to the
/// global atoms it came from.
pub fn lift_action(a: &BoolAction, j: &Binding, s: &Valuation, rule: UpdateRule) -> Result<Valuation, BoolError> {
    let local = pullback_valuation(j, &a.atoms, s)?;
    let after = apply_action(a, &local, rule)?;
    let mut out = s.clone();
    for (i, atom) in a.atoms.atoms.iter().enumerate() {
        if let Some(g) = s.atoms.index_of(&j.image(atom)?) {
            out.set(g, after.get(i));
        }
    }
    Ok(out)
}
