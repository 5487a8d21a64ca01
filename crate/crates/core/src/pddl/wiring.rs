use super::{PddlError, Plan, Problem};
use crate::diagram::{build_diagram, Diagram, DiagramBuilder, NodeKind, WireEnd};
use crate::rewrite::{prove_equal, Budget, Outcome};
use crate::signature::{AgreementLiteral, AttrInfo, GeneratorDecl, ParamPort, Polarity, Signature};
use crate::term::Term;
use std::collections::HashMap;

/// Which condition of a generator to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Pre,
    Post,
}

/// Open object wires while a plan diagram is being built.
struct Wiring<'a> {
    sig: &'a Signature,
    b: DiagramBuilder,
    wires: HashMap<String, WireEnd>,
    /// Data objects stay available after a generator consumes them.
    keep_data: bool,
    step: usize,
}

impl Wiring<'_> {
    fn err(&self, msg: String) -> PddlError {
        PddlError::Wiring { step: self.step, msg }
    }

    fn take(&mut self, obj: &str) -> Result<WireEnd, PddlError> {
        self.wires.remove(obj).ok_or_else(|| self.err(format!("object '{}' is not available", obj)))
    }

    fn put(&mut self, obj: &str, e: WireEnd) -> Result<(), PddlError> {
        if self.wires.contains_key(obj) {
            return Err(self.err(format!("object '{}' already exists", obj)));
        }
        self.wires.insert(obj.to_string(), e.labeled(obj));
        Ok(())
    }

    /// A copy of a data wire; the original stays open.
    fn copy(&mut self, obj: &str) -> Result<WireEnd, PddlError> {
        let e = self.take(obj)?;
        let ty = e.ty.clone();
        let mut o = self.b.node(NodeKind::Delta(ty.clone()), vec![e], vec![ty.clone(), ty], None);
        let c = o.pop().unwrap();
        self.put(obj, o.pop().unwrap())?;
        Ok(c)
    }

    /// The value of `attr` on `obj`.
    fn read(&mut self, obj: &str, attr: &AttrInfo) -> Result<WireEnd, PddlError> {
        if attr.is_copy {
            return self.copy(obj);
        }
        let e = self.take(obj)?;
        let mut o = self.b.node(NodeKind::Gamma(attr.name.clone()), vec![e], vec![attr.carrier.clone(), attr.value.clone()], None);
        let v = o.pop().unwrap();
        self.put(obj, o.pop().unwrap())?;
        Ok(v)
    }

    /// Keep only the runs where two values agree: `mu ; eps`.
    fn filter(&mut self, v1: WireEnd, v2: WireEnd) {
        let d = v1.ty.clone();
        let m = self.b.node(NodeKind::Mu(d.clone()), vec![v1, v2], vec![d.clone()], None);
        self.b.node(NodeKind::Eps(d), m, vec![], None);
    }

    fn sides(&self, g: &GeneratorDecl, types: &[String], l: &AgreementLiteral) -> Result<(AttrInfo, AttrInfo), PddlError> {
        let a1 = self.sig.literal_attr(&l.attr_l, &types[l.pos_l]);
        let a2 = self.sig.literal_attr(&l.attr_r, &types[l.pos_r]);
        a1.zip(a2).ok_or_else(|| PddlError::UnknownLiteral(g.name.clone()))
    }

    /// Wire one generator application. Returns the object names of its
    /// codomain ports; data outputs not bound to a parameter get `#<port>`.
    fn step(&mut self, g: &GeneratorDecl, args: &[String], pre: &[&AgreementLiteral], post: &[&AgreementLiteral], tag: String) -> Result<Vec<String>, PddlError> {
        let params = g.params(self.sig);
        let types: Vec<String> = params.iter().map(|p| p.ty.clone()).collect();
        for l in pre.iter().filter(|l| l.polarity == Polarity::Pos) {
            let (a1, a2) = self.sides(g, &types, l)?;
            let v1 = self.read(&args[l.pos_l], &a1)?;
            let v2 = self.read(&args[l.pos_r], &a2)?;
            self.filter(v1, v2);
        }
        // post sides on inputs that the generator consumes are read before it
        let before = |p: usize| matches!(params[p].port, ParamPort::Domain { through: None, .. });
        let post: Vec<&AgreementLiteral> = post.iter().copied().filter(|l| l.polarity == Polarity::Pos).collect();
        let mut early: Vec<[Option<WireEnd>; 2]> = Vec::new();
        for l in &post {
            let (a1, a2) = self.sides(g, &types, l)?;
            let v1 = if before(l.pos_l) { Some(self.read(&args[l.pos_l], &a1)?) } else { None };
            let v2 = if before(l.pos_r) { Some(self.read(&args[l.pos_r], &a2)?) } else { None };
            early.push([v1, v2]);
        }
        let mut ins = Vec::new();
        for (i, ty) in g.domain.iter().enumerate() {
            let e = if self.keep_data && self.sig.is_data(ty) { self.copy(&args[i])? } else { self.take(&args[i])? };
            ins.push(e);
        }
        let outs = self.b.node(NodeKind::Generator(g.name.clone()), ins, g.codomain.clone(), Some(tag));
        let mut names = Vec::new();
        for (j, e) in outs.into_iter().enumerate() {
            let bound = params.iter().position(|p| match p.port {
                ParamPort::Domain { through, .. } => through == Some(j),
                ParamPort::Codomain { index } => index == j,
            });
            let name = match bound {
                Some(p) => args[p].clone(),
                None => format!("#{}", j),
            };
            if self.keep_data && self.wires.contains_key(&name) && self.sig.is_data(&e.ty) {
                // the data object is still open from before the step
                let ty = e.ty.clone();
                self.b.node(NodeKind::Eps(ty), vec![e], vec![], None);
                names.push(format!("#{}", j));
                continue;
            }
            self.put(&name, e)?;
            names.push(name);
        }
        for (l, [v1, v2]) in post.iter().zip(early) {
            let (a1, a2) = self.sides(g, &types, l)?;
            let v1 = match v1 {
                Some(v) => v,
                None => self.read(&args[l.pos_l], &a1)?,
            };
            let v2 = match v2 {
                Some(v) => v,
                None => self.read(&args[l.pos_r], &a2)?,
            };
            self.filter(v1, v2);
        }
        Ok(names)
    }
}

/// The string diagram of a validated plan. Inputs are the problem objects
/// that exist before the plan (entities not first produced by a step, and all
/// data objects); outputs are the objects alive at the end, in problem order.
/// Each step is a generator node tagged `<k>: (<action> <args>)`, preceded by
/// a read-and-filter for each positive precondition and followed by one for
/// each positive post-condition. Boundary wires are labeled with object names.
pub fn plan_to_diagram(plan: &Plan, problem: &Problem, sig: &Signature) -> Result<Diagram, PddlError> {
    super::validate_plan(plan, problem, sig)?;
    let mut produced_first = Vec::new();
    let mut seen = Vec::new();
    for s in &plan.steps {
        let g = sig.generator(&s.action).ok_or_else(|| PddlError::UnknownGenerator(s.action.clone()))?;
        for (p, a) in g.params(sig).iter().zip(&s.args) {
            if !seen.contains(a) {
                seen.push(a.clone());
                if matches!(p.port, ParamPort::Codomain { .. }) {
                    produced_first.push(a.clone());
                }
            }
        }
    }
    let mut w = Wiring { sig, b: DiagramBuilder::new(), wires: HashMap::new(), keep_data: true, step: 0 };
    for o in problem.objects.iter().filter(|o| !produced_first.contains(&o.name)) {
        let e = w.b.input(&o.ty, Some(&o.name));
        w.wires.insert(o.name.clone(), e);
    }
    for (k, s) in plan.steps.iter().enumerate() {
        w.step = k + 1;
        let g = sig.generator(&s.action).unwrap();
        let pre: Vec<&AgreementLiteral> = g.pre.iter().collect();
        let post: Vec<&AgreementLiteral> = g.post.iter().collect();
        let tag = format!("{}: ({} {})", k + 1, super::action_name(&g.name), s.args.join(" "));
        for n in w.step(g, &s.args, &pre, &post, tag)? {
            if !n.starts_with('#') {
                continue;
            }
            if let Some(e) = w.wires.remove(&n) {
                w.b.node(NodeKind::Eps(e.ty.clone()), vec![e], vec![], None);
            }
        }
    }
    let mut outs = Vec::new();
    for o in &problem.objects {
        if let Some(e) = w.wires.remove(&o.name) {
            outs.push(e);
        }
    }
    Ok(w.b.finish(outs))
}

/// Prove that a declared condition follows from the axioms: `gen` followed
/// by the post-condition filter (or preceded by the precondition filter)
/// equals `gen`. The proof starts at the filtered composite.
pub fn verify_condition(gen: &str, which: Which, lit: &AgreementLiteral, sig: &Signature, budget: &Budget) -> Result<Outcome, PddlError> {
    let g = sig.generator(gen).ok_or_else(|| PddlError::UnknownGenerator(gen.to_string()))?;
    let declared = match which {
        Which::Pre => &g.pre,
        Which::Post => &g.post,
    };
    if !declared.contains(lit) || lit.polarity == Polarity::Neg {
        return Err(PddlError::UnknownLiteral(gen.to_string()));
    }
    let params = g.params(sig);
    let names: Vec<String> = (0..params.len()).map(|i| format!("p{}", i)).collect();
    let mut w = Wiring { sig, b: DiagramBuilder::new(), wires: HashMap::new(), keep_data: false, step: 1 };
    for (i, ty) in g.domain.iter().enumerate() {
        let e = w.b.input(ty, None);
        w.wires.insert(names[i].clone(), e);
    }
    let (pre, post) = match which {
        Which::Pre => (vec![lit], vec![]),
        Which::Post => (vec![], vec![lit]),
    };
    let outs = w.step(g, &names, &pre, &post, g.name.clone())?;
    let ends: Vec<WireEnd> = outs.iter().map(|n| w.wires.remove(n).unwrap()).collect();
    let lhs = build_diagram(&Term::Gen(g.name.clone()), sig)?;
    let mut rhs = w.b.finish(ends);
    for wire in &mut rhs.wires {
        wire.label = None;
    }
    // Search forward from the filtered side: its rewrites only drop reads,
    // which the reverse direction cannot always undo in one step.
    Ok(prove_equal(&rhs, &lhs, budget, sig)?)
}
