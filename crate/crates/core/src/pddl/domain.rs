use super::sexpr::{parse_all, Sexp};
use super::{check_signature, plan::action_name, pred_name, PddlError};
use crate::signature::{AgreementLiteral, AttrInfo, Polarity, Signature};
use std::collections::HashMap;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredDecl {
    pub name: String,
    /// `(variable, type)` pairs.
    pub params: Vec<(String, String)>,
}

/// A literal over action variables. `pred` is `=` for equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLit {
    pub positive: bool,
    pub pred: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub pre: Vec<PLit>,
    pub effect: Vec<PLit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainDecl {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<String>,
    pub predicates: Vec<PredDecl>,
    pub actions: Vec<ActionDecl>,
}

/// Attributes of one data object: declared ones first, then `copy`.
fn attrs_valued_in(sig: &Signature, d: &str) -> Vec<AttrInfo> {
    let mut v: Vec<AttrInfo> = sig.attributes.iter().filter(|a| a.value == d).filter_map(|a| sig.attr_info(&a.name)).collect();
    v.extend(sig.attr_info(&format!("copy:{}", d)));
    v
}

/// Variable names from type initials, numbered on collision: `?r ?b ?r1`.
pub(crate) fn var_names(types: &[String]) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    types
        .iter()
        .map(|t| {
            let base = t.chars().next().map(|c| c.to_ascii_lowercase().to_string()).unwrap_or_else(|| "x".into());
            let n = seen.entry(base.clone()).or_insert(0);
            let v = if *n == 0 { format!("?{}", base) } else { format!("?{}{}", base, n) };
            *n += 1;
            v
        })
        .collect()
}

fn lit_sides(sig: &Signature, types: &[String], l: &AgreementLiteral) -> (AttrInfo, AttrInfo) {
    // validated signatures resolve every literal
    let a1 = sig.literal_attr(&l.attr_l, &types[l.pos_l]).unwrap();
    let a2 = sig.literal_attr(&l.attr_r, &types[l.pos_r]).unwrap();
    (a1, a2)
}

fn plit(sig: &Signature, types: &[String], vars: &[String], l: &AgreementLiteral, mirrored: bool) -> Option<PLit> {
    let (mut a1, mut a2) = lit_sides(sig, types, l);
    let (mut x1, mut x2) = (vars[l.pos_l].clone(), vars[l.pos_r].clone());
    if mirrored {
        std::mem::swap(&mut a1, &mut a2);
        std::mem::swap(&mut x1, &mut x2);
    }
    let positive = l.polarity == Polarity::Pos;
    if a1.is_copy && a2.is_copy {
        return (!mirrored).then(|| PLit { positive, pred: "=".into(), args: vec![x1, x2] });
    }
    Some(PLit { positive, pred: pred_name(&a1, &a2), args: vec![x1, x2] })
}

/// Structured PDDL domain for a valid signature.
pub fn domain_decl(sig: &Signature) -> Result<DomainDecl, PddlError> {
    check_signature(sig)?;
    let mut predicates = Vec::new();
    for d in sig.data_objects() {
        let attrs = attrs_valued_in(sig, &d.name);
        for a1 in &attrs {
            for a2 in &attrs {
                if a1.is_copy && a2.is_copy {
                    // copy-copy agreement is equality
                    continue;
                }
                predicates.push(PredDecl {
                    name: pred_name(a1, a2),
                    params: vec![("?x".into(), a1.carrier.clone()), ("?y".into(), a2.carrier.clone())],
                });
            }
        }
    }
    let mut actions = Vec::new();
    for g in &sig.generators {
        let params = g.params(sig);
        let types: Vec<String> = params.iter().map(|p| p.ty.clone()).collect();
        let vars = var_names(&types);
        let pre = g.pre.iter().filter_map(|l| plit(sig, &types, &vars, l, false)).collect();
        let mut effect = Vec::new();
        for l in &g.post {
            effect.extend(plit(sig, &types, &vars, l, false).filter(|p| p.pred != "="));
            effect.extend(plit(sig, &types, &vars, l, true));
        }
        actions.push(ActionDecl { name: action_name(&g.name), params: vars.into_iter().zip(types).collect(), pre, effect });
    }
    Ok(DomainDecl {
        name: "attr-domain".into(),
        requirements: vec![":strips".into(), ":typing".into(), ":equality".into()],
        types: sig.objects.iter().map(|o| o.name.clone()).collect(),
        predicates,
        actions,
    })
}

fn typed(ps: &[(String, String)]) -> String {
    ps.iter().map(|(v, t)| format!("{} - {}", v, t)).collect::<Vec<_>>().join(" ")
}

fn render_lit(l: &PLit) -> String {
    let a = format!("({} {})", l.pred, l.args.join(" "));
    if l.positive {
        a
    } else {
        format!("(not {})", a)
    }
}

fn conj(ls: &[PLit]) -> String {
    let parts: Vec<String> = ls.iter().map(render_lit).collect();
    if parts.is_empty() {
        "(and)".into()
    } else {
        format!("(and {})", parts.join(" "))
    }
}

pub fn render_domain(d: &DomainDecl) -> String {
    let mut s = String::new();
    writeln!(s, "(define (domain {})", d.name).unwrap();
    writeln!(s, "  (:requirements {})", d.requirements.join(" ")).unwrap();
    writeln!(s, "  (:types {})", d.types.join(" ")).unwrap();
    writeln!(s, "  (:predicates").unwrap();
    for p in &d.predicates {
        writeln!(s, "    ({} {})", p.name, typed(&p.params)).unwrap();
    }
    write!(s, "  )").unwrap();
    for a in &d.actions {
        writeln!(s).unwrap();
        writeln!(s, "  (:action {}", a.name).unwrap();
        writeln!(s, "    :parameters ({})", typed(&a.params)).unwrap();
        writeln!(s, "    :precondition {}", conj(&a.pre)).unwrap();
        write!(s, "    :effect {})", conj(&a.effect)).unwrap();
    }
    writeln!(s, ")").unwrap();
    s
}

/// PDDL domain text: one predicate per ordered attribute pair sharing a data
/// object, one action per generator.
pub fn emit_domain(sig: &Signature) -> Result<String, PddlError> {
    Ok(render_domain(&domain_decl(sig)?))
}

fn bad(msg: impl Into<String>) -> PddlError {
    PddlError::Syntax { line: 0, msg: msg.into() }
}

fn atoms_of(xs: &[Sexp]) -> Result<Vec<String>, PddlError> {
    xs.iter().map(|x| x.atom().map(str::to_string).ok_or_else(|| bad(format!("expected a name, found '{}'", x)))).collect()
}

/// `?a ?b - T ?c - U` into `(var, type)` pairs.
fn typed_list(xs: &[Sexp]) -> Result<Vec<(String, String)>, PddlError> {
    let words = atoms_of(xs)?;
    let mut out = Vec::new();
    let mut pending = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if words[i] == "-" {
            let ty = words.get(i + 1).ok_or_else(|| bad("dangling '-'"))?;
            out.extend(pending.drain(..).map(|v: String| (v, ty.clone())));
            i += 2;
        } else {
            pending.push(words[i].clone());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|v| (v, "object".to_string())));
    Ok(out)
}

fn parse_lit(e: &Sexp) -> Result<PLit, PddlError> {
    if e.head() == Some("not") {
        let l = e.list().unwrap();
        let mut p = parse_lit(l.get(1).ok_or_else(|| bad("empty 'not'"))?)?;
        p.positive = !p.positive;
        return Ok(p);
    }
    let l = e.list().ok_or_else(|| bad(format!("expected a literal, found '{}'", e)))?;
    let words = atoms_of(l)?;
    let (pred, args) = words.split_first().ok_or_else(|| bad("empty literal"))?;
    Ok(PLit { positive: true, pred: pred.clone(), args: args.to_vec() })
}

fn parse_conj(e: &Sexp) -> Result<Vec<PLit>, PddlError> {
    if e.head() == Some("and") {
        e.list().unwrap()[1..].iter().map(parse_lit).collect()
    } else {
        Ok(vec![parse_lit(e)?])
    }
}

/// Read back a domain in the subset of PDDL that [`render_domain`] writes.
pub fn parse_domain(text: &str) -> Result<DomainDecl, PddlError> {
    let top = parse_all(text, 1).map_err(|e| PddlError::Syntax { line: e.line, msg: e.msg })?;
    let [def] = &top[..] else { return Err(bad("expected a single (define ...)")) };
    let items = def.list().filter(|_| def.head() == Some("define")).ok_or_else(|| bad("expected (define ...)"))?;
    let mut d = DomainDecl { name: String::new(), requirements: vec![], types: vec![], predicates: vec![], actions: vec![] };
    for it in &items[1..] {
        let l = it.list().ok_or_else(|| bad(format!("unexpected '{}'", it)))?;
        match it.head() {
            Some("domain") => d.name = atoms_of(&l[1..])?.join(" "),
            Some(":requirements") => d.requirements = atoms_of(&l[1..])?,
            Some(":types") => d.types = typed_list(&l[1..])?.into_iter().map(|(t, _)| t).collect(),
            Some(":predicates") => {
                for p in &l[1..] {
                    let pl = p.list().ok_or_else(|| bad("bad predicate"))?;
                    let name = pl.first().and_then(Sexp::atom).ok_or_else(|| bad("bad predicate"))?;
                    d.predicates.push(PredDecl { name: name.to_string(), params: typed_list(&pl[1..])? });
                }
            }
            Some(":action") => {
                let name = l.get(1).and_then(Sexp::atom).ok_or_else(|| bad("action without a name"))?;
                let mut a = ActionDecl { name: name.to_string(), params: vec![], pre: vec![], effect: vec![] };
                let mut k = 2;
                while k + 1 < l.len() {
                    let body = &l[k + 1];
                    match l[k].atom() {
                        Some(":parameters") => a.params = typed_list(body.list().ok_or_else(|| bad("bad parameters"))?)?,
                        Some(":precondition") => a.pre = parse_conj(body)?,
                        Some(":effect") => a.effect = parse_conj(body)?,
                        _ => return Err(bad(format!("unexpected '{}' in action {}", l[k], name))),
                    }
                    k += 2;
                }
                d.actions.push(a);
            }
            _ => return Err(bad(format!("unexpected section '{}'", it))),
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables_number_collisions() {
        let ts: Vec<String> = ["Robot", "Ball", "RobotBall", "Loc", "Robot"].iter().map(|s| s.to_string()).collect();
        assert_eq!(var_names(&ts), vec!["?r", "?b", "?r1", "?l", "?r2"]);
    }

    #[test]
    fn no_generators_gives_predicates_only() {
        let sig = crate::parse_signature("entity R\ndata L\nattr at : R -> L\n").unwrap();
        let d = domain_decl(&sig).unwrap();
        assert!(d.actions.is_empty());
        let names: Vec<&str> = d.predicates.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, vec!["agree-L-at-at", "agree-L-at-copy", "agree-L-copy-at"]);
        assert_eq!(parse_domain(&render_domain(&d)).unwrap(), d);
    }

    #[test]
    fn copy_copy_literals_become_equality() {
        let sig = crate::parse_signature("data L\ngen same : L * L -> L\n  pre agree(copy@0, copy@1)\n").unwrap();
        let d = domain_decl(&sig).unwrap();
        assert_eq!(d.actions[0].pre, vec![PLit { positive: true, pred: "=".into(), args: vec!["?l".into(), "?l1".into()] }]);
        assert_eq!(parse_domain(&emit_domain(&sig).unwrap()).unwrap(), d);
    }
}
