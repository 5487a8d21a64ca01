use super::sexpr::{parse_all, Sexp};
use super::{agreement, check_signature, resolve_pred, state_preds, PddlError};
use crate::boolean::{atoms_for, Proposition, TypedObj, Valuation};
use crate::signature::Signature;
use std::fmt::Write;

/// A planning problem over the state atoms of a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub objects: Vec<TypedObj>,
    pub init: Valuation,
    pub goal: Proposition,
    /// Attributes whose carriers hold at most one value at a time.
    pub exclusive: Vec<String>,
}

impl Problem {
    pub fn object(&self, name: &str) -> Option<&TypedObj> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn data_objects<'a>(&'a self, sig: &'a Signature) -> impl Iterator<Item = &'a TypedObj> {
        self.objects.iter().filter(move |o| sig.is_data(&o.ty))
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> PddlError {
    PddlError::Syntax { line, msg: msg.into() }
}

/// `(pred a b)` or, when `negatable`, `(not (pred a b))`, as a proposition.
fn literal(sig: &Signature, p: &ProblemParts, e: &Sexp, negatable: bool, line: usize) -> Result<Proposition, PddlError> {
    if negatable && e.head() == Some("not") {
        let l = e.list().unwrap();
        if l.len() != 2 {
            return Err(syntax(line, "'not' takes one literal"));
        }
        return Ok(literal(sig, p, &l[1], false, line)?.not());
    }
    let items = e.list().ok_or_else(|| syntax(line, format!("expected a literal, found '{}'", e)))?;
    let words: Vec<&str> = items.iter().map(|x| x.atom()).collect::<Option<_>>().ok_or_else(|| syntax(line, "nested literal"))?;
    let [pred, x1, x2] = words[..] else {
        return Err(syntax(line, format!("expected (<predicate> <obj> <obj>), found '{}'", e)));
    };
    let ty = |x: &str| {
        p.objects.iter().find(|o| o.name == x).map(|o| o.ty.clone()).ok_or_else(|| PddlError::UnknownObject { line, name: x.to_string() })
    };
    let (t1, t2) = (ty(x1)?, ty(x2)?);
    let (a1, a2) = resolve_pred(sig, pred, &t1, &t2).ok_or_else(|| PddlError::UnknownPredicate { line, name: pred.to_string() })?;
    Ok(agreement(&p.atoms, &p.objects, &a1, x1, &a2, x2))
}

struct ProblemParts {
    objects: Vec<TypedObj>,
    atoms: std::sync::Arc<crate::boolean::AtomSet>,
}

/// Parse the problem DSL:
///
/// ```text
/// problem <name>
/// object <name> : <type>
/// init <atom>*
/// goal <literal>*
/// exclusive <attr>*
/// ```
///
/// `init` atoms must be state atoms `agree-<D>-<a>-copy`. `#` and `;` start comments.
pub fn parse_problem(text: &str, sig: &Signature) -> Result<Problem, PddlError> {
    check_signature(sig)?;
    let mut name = String::from("problem");
    let mut objects: Vec<TypedObj> = Vec::new();
    let mut inits = Vec::new();
    let mut goals = Vec::new();
    let mut exclusive = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "problem" => name = rest.to_string(),
            "object" => {
                let (n, ty) = rest.split_once(':').ok_or_else(|| syntax(no, "expected object <name> : <type>"))?;
                let (n, ty) = (n.trim(), ty.trim());
                if !crate::term::is_ident(n) {
                    return Err(syntax(no, format!("bad object name '{}'", n)));
                }
                if sig.object(ty).is_none() {
                    return Err(syntax(no, format!("unknown type '{}'", ty)));
                }
                if objects.iter().any(|o| o.name == n) {
                    return Err(syntax(no, format!("duplicate object '{}'", n)));
                }
                objects.push(TypedObj::new(n, ty));
            }
            "init" => inits.extend(parse_all(rest, no).map_err(|e| syntax(e.line, e.msg))?.into_iter().map(|e| (no, e))),
            "goal" => goals.extend(parse_all(rest, no).map_err(|e| syntax(e.line, e.msg))?.into_iter().map(|e| (no, e))),
            "exclusive" => {
                for a in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                    if !sig.attributes.iter().any(|x| x.name == a) {
                        return Err(syntax(no, format!("unknown attribute '{}'", a)));
                    }
                    exclusive.push(a.to_string());
                }
            }
            other => return Err(syntax(no, format!("unknown keyword '{}'", other))),
        }
    }
    let atoms = atoms_for(&state_preds(sig), &objects)?;
    let parts = ProblemParts { objects, atoms };
    let mut init = Valuation::empty(&parts.atoms);
    for (no, e) in &inits {
        let p = literal(sig, &parts, e, false, *no)?;
        match p.as_literal_conjunction().as_deref() {
            Some([(i, true)]) => init.set(*i, true),
            _ => return Err(syntax(*no, format!("init atom '{}' is not a state atom", e))),
        }
    }
    let mut goal = Proposition::top(&parts.atoms);
    for (no, e) in &goals {
        goal = goal.and(&literal(sig, &parts, e, true, *no)?)?;
    }
    Ok(Problem { name, objects: parts.objects, init, goal, exclusive })
}

/// PDDL problem text. The goal must be a conjunction of state literals.
pub fn emit_problem(p: &Problem, sig: &Signature) -> Result<String, PddlError> {
    check_signature(sig)?;
    if p.goal.is_bot() {
        return Err(PddlError::NonConjunctiveGoal("unsatisfiable"));
    }
    let lits = p.goal.as_literal_conjunction().ok_or(PddlError::NonConjunctiveGoal("disjunctive"))?;
    let atoms = p.init.atoms.atoms();
    let mut s = String::new();
    writeln!(s, "(define (problem {})", p.name).unwrap();
    writeln!(s, "  (:domain attr-domain)").unwrap();
    let objs: Vec<String> = p.objects.iter().map(|o| format!("{} - {}", o.name, o.ty)).collect();
    writeln!(s, "  (:objects {})", objs.join(" ")).unwrap();
    let init: Vec<String> = p.init.true_atoms().iter().map(|a| format!("({} {})", a.pred, a.args.join(" "))).collect();
    writeln!(s, "  (:init {})", init.join(" ")).unwrap();
    let goal: Vec<String> = lits
        .iter()
        .map(|&(i, v)| {
            let a = format!("({} {})", atoms[i].pred, atoms[i].args.join(" "));
            if v {
                a
            } else {
                format!("(not {})", a)
            }
        })
        .collect();
    writeln!(s, "  (:goal (and {})))", goal.join(" ")).unwrap();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIG: &str = "entity R\ndata L\nattr at : R -> L\n";

    #[test]
    fn parses_objects_init_and_goal() {
        let sig = crate::parse_signature(SIG).unwrap();
        let p = parse_problem(
            "problem demo\nobject r : R\nobject l1 : L\nobject l2 : L\ninit (agree-L-at-copy r l1)\ngoal (agree-L-at-copy r l2) (not (agree-L-at-copy r l1))\nexclusive at\n",
            &sig,
        )
        .unwrap();
        assert_eq!(p.name, "demo");
        assert_eq!(p.init.true_atoms().len(), 1);
        assert_eq!(p.goal.count_models(), 1);
        assert_eq!(p.exclusive, vec!["at".to_string()]);
        let text = emit_problem(&p, &sig).unwrap();
        assert!(text.contains("(:init (agree-L-at-copy r l1))"));
        assert!(text.contains("(:goal (and (not (agree-L-at-copy r l1)) (agree-L-at-copy r l2)))"));
    }

    #[test]
    fn empty_init_and_bottom_goal() {
        let sig = crate::parse_signature(SIG).unwrap();
        let p = parse_problem("object r : R\nobject l : L\n", &sig).unwrap();
        assert!(emit_problem(&p, &sig).unwrap().contains("(:init )"));
        let q = parse_problem("object r : R\nobject l : L\ngoal (agree-L-copy-copy l l) (not (agree-L-copy-copy l l))\n", &sig).unwrap();
        assert_eq!(emit_problem(&q, &sig).unwrap_err().to_string(), "unsatisfiable goal is not a literal conjunction");
    }

    #[test]
    fn rejects_unknown_names() {
        let sig = crate::parse_signature(SIG).unwrap();
        assert!(matches!(parse_problem("object r : R\ninit (agree-L-at-copy r z)\n", &sig), Err(PddlError::UnknownObject { line: 2, .. })));
        assert!(matches!(parse_problem("object r : Q\n", &sig), Err(PddlError::Syntax { line: 1, .. })));
    }
}
