use super::*;
use crate::signature::Signature;
use crate::term::Term;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("type mismatch in composition: {left:?} vs {right:?}")]
    TypeMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown name '{0}'")]
    Unknown(String),
    #[error("'{0}' is not a data object")]
    NotData(String),
    #[error("attributes '{0}' and '{1}' are valued in different data services")]
    ValueMismatch(String, String),
    #[error("unresolved reference '@{0}'")]
    UnresolvedRef(String),
    #[error("reference cycle through '@{0}'")]
    RefCycle(String),
}

fn single(kind: NodeKind, ins: Vec<String>, outs: Vec<String>) -> Diagram {
    let mut b = DiagramBuilder::new();
    let ends = ins.iter().map(|t| b.input(t, None)).collect();
    let o = b.node(kind, ends, outs, None);
    b.finish(o)
}

fn data(sig: &Signature, d: &str) -> Result<String, DiagramError> {
    match sig.object(d) {
        None => Err(DiagramError::Unknown(d.to_string())),
        Some(_) if !sig.is_data(d) => Err(DiagramError::NotData(d.to_string())),
        Some(_) => Ok(d.to_string()),
    }
}

fn object(sig: &Signature, a: &str) -> Result<String, DiagramError> {
    sig.object(a).map(|o| o.name.clone()).ok_or_else(|| DiagramError::Unknown(a.to_string()))
}

/// Elaborate a term into a diagram. `@name` references resolve through
/// [`Signature::resolve_ref`]. `get`/`set` of a copy attribute elaborate to
/// `delta`/`mu`; `chi[a1,a2]` elaborates to two Gamma nodes whose values meet
/// in a Mu followed by an Eps.
pub fn build_diagram(term: &Term, sig: &Signature) -> Result<Diagram, DiagramError> {
    elab(term, sig, &mut Vec::new())
}

fn elab(term: &Term, sig: &Signature, stack: &mut Vec<String>) -> Result<Diagram, DiagramError> {
    Ok(match term {
        Term::Id(a) => Diagram::identity(&[object(sig, a)?]),
        Term::Swap(a, b) => {
            let (a, b) = (object(sig, a)?, object(sig, b)?);
            Diagram {
                nodes: vec![],
                wires: vec![
                    Wire { src: Endpoint::Boundary(0), dst: Endpoint::Boundary(1), ty: a.clone(), label: None },
                    Wire { src: Endpoint::Boundary(1), dst: Endpoint::Boundary(0), ty: b.clone(), label: None },
                ],
                inputs: vec![a.clone(), b.clone()],
                outputs: vec![b, a],
            }
        }
        Term::Mu(d) => {
            let d = data(sig, d)?;
            single(NodeKind::Mu(d.clone()), vec![d.clone(), d.clone()], vec![d])
        }
        Term::Delta(d) => {
            let d = data(sig, d)?;
            single(NodeKind::Delta(d.clone()), vec![d.clone()], vec![d.clone(), d])
        }
        Term::Eps(d) => {
            let d = data(sig, d)?;
            single(NodeKind::Eps(d.clone()), vec![d], vec![])
        }
        Term::Get(a) => {
            let ai = sig.attr_info(a).ok_or_else(|| DiagramError::Unknown(a.clone()))?;
            if ai.is_copy {
                elab(&Term::Delta(ai.value), sig, stack)?
            } else {
                single(NodeKind::Gamma(ai.name), vec![ai.carrier.clone()], vec![ai.carrier, ai.value])
            }
        }
        Term::Set(a) => {
            let ai = sig.attr_info(a).ok_or_else(|| DiagramError::Unknown(a.clone()))?;
            if ai.is_copy {
                elab(&Term::Mu(ai.value), sig, stack)?
            } else {
                single(NodeKind::Phi(ai.name), vec![ai.carrier.clone(), ai.value], vec![ai.carrier])
            }
        }
        Term::Chi(a1, a2) => {
            let i1 = sig.attr_info(a1).ok_or_else(|| DiagramError::Unknown(a1.clone()))?;
            let i2 = sig.attr_info(a2).ok_or_else(|| DiagramError::Unknown(a2.clone()))?;
            if i1.value != i2.value {
                return Err(DiagramError::ValueMismatch(a1.clone(), a2.clone()));
            }
            let d = i1.value.clone();
            let mut b = DiagramBuilder::new();
            let m1 = b.input(&i1.carrier, None);
            let m2 = b.input(&i2.carrier, None);
            let get = |b: &mut DiagramBuilder, i: &crate::signature::AttrInfo, m: WireEnd| {
                let kind = if i.is_copy { NodeKind::Delta(d.clone()) } else { NodeKind::Gamma(i.name.clone()) };
                let mut o = b.node(kind, vec![m], vec![i.carrier.clone(), d.clone()], None);
                let v = o.pop().unwrap();
                (o.pop().unwrap(), v)
            };
            let (m1, v1) = get(&mut b, &i1, m1);
            let (m2, v2) = get(&mut b, &i2, m2);
            let v = b.node(NodeKind::Mu(d.clone()), vec![v1, v2], vec![d.clone()], None);
            b.node(NodeKind::Eps(d.clone()), v, vec![], None);
            b.finish(vec![m1, m2])
        }
        Term::Gen(g) => {
            let gd = sig.generator(g).ok_or_else(|| DiagramError::Unknown(g.clone()))?;
            single(NodeKind::Generator(gd.name.clone()), gd.domain.clone(), gd.codomain.clone())
        }
        Term::Ref(r) => {
            if stack.contains(r) {
                return Err(DiagramError::RefCycle(r.clone()));
            }
            let t = sig.resolve_ref(r).ok_or_else(|| DiagramError::UnresolvedRef(r.clone()))?;
            stack.push(r.clone());
            let d = elab(t, sig, stack)?;
            stack.pop();
            d
        }
        Term::Seq(ts) => {
            let mut acc = elab(&ts[0], sig, stack)?;
            for t in &ts[1..] {
                acc = acc.then(&elab(t, sig, stack)?)?;
            }
            acc
        }
        Term::Par(ts) => {
            let mut acc = elab(&ts[0], sig, stack)?;
            for t in &ts[1..] {
                acc = acc.tensor(&elab(t, sig, stack)?);
            }
            acc
        }
    })
}
