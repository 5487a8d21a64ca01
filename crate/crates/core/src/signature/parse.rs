use super::*;
use crate::term::{is_ident, parse_term};
use std::collections::HashSet;

struct Line<'a> {
    no: usize,
    text: &'a str,
    indented: bool,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> SignatureError {
    SignatureError::Syntax { line, col, msg: msg.into() }
}

fn col_of(line: &str, part: &str) -> usize {
    // part is a subslice of line
    (part.as_ptr() as usize).saturating_sub(line.as_ptr() as usize) + 1
}

fn ident<'a>(l: &Line<'a>, s: &'a str) -> Result<String, SignatureError> {
    let s = s.trim();
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(syntax(l.no, col_of(l.text, s), format!("expected identifier, found '{}'", s)))
    }
}

fn obj_list<'a>(l: &Line<'a>, s: &'a str) -> Result<Vec<String>, SignatureError> {
    s.split('*').map(|p| ident(l, p)).collect()
}

fn parse_literals<'a>(l: &Line<'a>, s: &'a str) -> Result<Vec<AgreementLiteral>, SignatureError> {
    let mut out = Vec::new();
    let mut rest = s.trim_start();
    while !rest.is_empty() {
        let col = col_of(l.text, rest);
        let (polarity, body) = match rest.strip_prefix('!') {
            Some(b) => (Polarity::Neg, b.trim_start()),
            None => (Polarity::Pos, rest),
        };
        let body = body
            .strip_prefix("agree")
            .map(str::trim_start)
            .and_then(|b| b.strip_prefix('('))
            .ok_or_else(|| syntax(l.no, col, "expected agree(<attr>@<idx>, <attr>@<idx>)"))?;
        let close = body.find(')').ok_or_else(|| syntax(l.no, col, "unclosed agree("))?;
        let args: Vec<&str> = body[..close].split(',').collect();
        if args.len() != 2 {
            return Err(syntax(l.no, col, "agree takes two arguments"));
        }
        let mut sides = Vec::new();
        for a in args {
            let (attr, idx) = a
                .split_once('@')
                .ok_or_else(|| syntax(l.no, col_of(l.text, a), "expected <attr>@<idx>"))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| syntax(l.no, col_of(l.text, idx), "expected port index"))?;
            sides.push((ident(l, attr)?, idx));
        }
        let (attr_r, pos_r) = sides.pop().unwrap();
        let (attr_l, pos_l) = sides.pop().unwrap();
        out.push(AgreementLiteral { polarity, attr_l, pos_l, attr_r, pos_r });
        rest = body[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Ok(out)
}

fn term_at(l: &Line, s: &str) -> Result<Term, SignatureError> {
    parse_term(s).map_err(|e| syntax(l.no, col_of(l.text, s) + e.col - 1, e.msg))
}

/// Parse the signature DSL. Checks syntax, duplicate names and references to
/// undeclared objects or attributes; term-level checks happen in
/// [`validate_signature`](super::validate_signature).
pub fn parse_signature(text: &str) -> Result<Signature, SignatureError> {
    let mut sig = Signature::default();
    let lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            return None;
        }
        Some(Line { no: i + 1, text, indented: text.starts_with(|c: char| c.is_whitespace()) })
    });

    for l in lines {
        let t = l.text.trim();
        let (kw, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        if l.indented && (kw == "pre" || kw == "post") {
            let g = sig
                .generators
                .last_mut()
                .ok_or_else(|| syntax(l.no, 1, "condition block outside a generator"))?;
            let lits = parse_literals(&l, rest)?;
            if kw == "pre" {
                g.pre.extend(lits)
            } else {
                g.post.extend(lits)
            }
            continue;
        }
        let line = SrcLine(l.no);
        match kw {
            "entity" | "data" => {
                let sort = if kw == "entity" { Sort::Entity } else { Sort::Data };
                sig.objects.push(ObjectDecl { name: ident(&l, rest)?, sort, line });
            }
            "attr" => {
                let (name, ty) = rest.split_once(':').ok_or_else(|| syntax(l.no, 1, "expected attr <name> : <carrier> -> <value>"))?;
                let (c, v) = ty.split_once("->").ok_or_else(|| syntax(l.no, col_of(l.text, ty), "expected '->'"))?;
                sig.attributes.push(AttributeDecl { name: ident(&l, name)?, carrier: ident(&l, c)?, value: ident(&l, v)?, line });
            }
            "gen" => {
                let (name, ty) = rest.split_once(':').ok_or_else(|| syntax(l.no, 1, "expected gen <name> : <objs> -> <objs>"))?;
                let (d, c) = ty.split_once("->").ok_or_else(|| syntax(l.no, col_of(l.text, ty), "expected '->'"))?;
                sig.generators.push(GeneratorDecl {
                    name: ident(&l, name)?,
                    domain: obj_list(&l, d)?,
                    codomain: obj_list(&l, c)?,
                    pre: vec![],
                    post: vec![],
                    line,
                });
            }
            "axiom" => {
                let (name, body) = rest.split_once(':').ok_or_else(|| syntax(l.no, 1, "expected axiom <name> : <term> = <term>"))?;
                let (kind, lhs, rhs) = if let Some((a, b)) = body.split_once("<=") {
                    (AxiomKind::Leq, a, b)
                } else if let Some((a, b)) = body.split_once('=') {
                    (AxiomKind::Equal, a, b)
                } else {
                    return Err(syntax(l.no, col_of(l.text, body), "expected '=' or '<='"));
                };
                sig.axioms.push(AxiomDecl { name: ident(&l, name)?, kind, lhs: term_at(&l, lhs)?, rhs: term_at(&l, rhs)?, line });
            }
            "term" => {
                let (name, body) = rest.split_once('=').ok_or_else(|| syntax(l.no, 1, "expected term <name> = <term>"))?;
                sig.terms.push(TermDecl { name: ident(&l, name)?, term: term_at(&l, body)?, line });
            }
            _ => return Err(syntax(l.no, col_of(l.text, kw), format!("unknown declaration '{}'", kw))),
        }
    }
    check_names(&sig)?;
    Ok(sig)
}

/// Parse a file of `term <name> = <term>` lines into `sig.terms`.
pub fn parse_terms_into(sig: &mut Signature, text: &str) -> Result<(), SignatureError> {
    let extra = parse_signature(text)?;
    if !extra.objects.is_empty() || !extra.attributes.is_empty() || !extra.generators.is_empty() || !extra.axioms.is_empty() {
        return Err(syntax(1, 1, "a terms file may only contain term declarations"));
    }
    sig.terms.extend(extra.terms);
    check_names(sig)
}

fn check_names(sig: &Signature) -> Result<(), SignatureError> {
    let mut seen = HashSet::new();
    let names = sig
        .objects
        .iter()
        .map(|o| (&o.name, o.line.0))
        .chain(sig.attributes.iter().map(|a| (&a.name, a.line.0)))
        .chain(sig.generators.iter().map(|g| (&g.name, g.line.0)))
        .chain(sig.axioms.iter().map(|a| (&a.name, a.line.0)))
        .chain(sig.terms.iter().map(|t| (&t.name, t.line.0)));
    for (n, line) in names {
        if !seen.insert(n.as_str()) {
            return Err(SignatureError::Duplicate { name: n.clone(), line });
        }
    }
    let unknown = |name: &str, line: SrcLine| SignatureError::UnknownRef { name: name.to_string(), line: line.0 };
    for a in &sig.attributes {
        for o in [&a.carrier, &a.value] {
            if sig.object(o).is_none() {
                return Err(unknown(o, a.line));
            }
        }
    }
    for g in &sig.generators {
        for o in g.domain.iter().chain(&g.codomain) {
            if sig.object(o).is_none() {
                return Err(unknown(o, g.line));
            }
        }
        for lit in g.pre.iter().chain(&g.post) {
            for a in [&lit.attr_l, &lit.attr_r] {
                if a != "copy" && sig.attr_info(a).is_none() {
                    return Err(unknown(a, g.line));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let s = parse_signature("entity Robot\ndata Loc").unwrap();
        assert_eq!(s.objects.len(), 2);
        assert!(s.attributes.is_empty());
        assert_eq!(s.sort_of("Loc"), Some(Sort::Data));
    }

    #[test]
    fn duplicate() {
        let e = parse_signature("entity Robot\nentity Robot").unwrap_err();
        assert_eq!(e, SignatureError::Duplicate { name: "Robot".into(), line: 2 });
    }

    #[test]
    fn unknown_reference() {
        let e = parse_signature("entity R\nattr a : R -> L").unwrap_err();
        assert!(matches!(e, SignatureError::UnknownRef { ref name, line: 2 } if name == "L"));
    }

    #[test]
    fn syntax_positions() {
        let e = parse_signature("entity R\n\nattr a R -> L").unwrap_err();
        assert!(matches!(e, SignatureError::Syntax { line: 3, .. }));
        let e = parse_signature("entity R\naxiom x : id[R] ; = id[R]").unwrap_err();
        match e {
            SignatureError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 19);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn conditions_and_comments() {
        let src = "entity R # robot\ndata L\nattr loc : R -> L\ngen M : R * L -> R\n  pre !agree(loc@0, copy@1)\n  post agree(loc@0, copy@1) agree(copy@1, loc@0)\n";
        let s = parse_signature(src).unwrap();
        let g = s.generator("M").unwrap();
        assert_eq!(g.pre.len(), 1);
        assert_eq!(g.pre[0].polarity, Polarity::Neg);
        assert_eq!(g.post.len(), 2);
        assert_eq!(g.post[1].attr_l, "copy");
        assert_eq!(g.post[1].pos_r, 0);
    }

    #[test]
    fn leq_axiom_and_terms() {
        let s = parse_signature("data D\naxiom wb : mu[D] ; delta[D] <= id[D] * id[D]\nterm t = delta[D]\n").unwrap();
        assert_eq!(s.axioms[0].kind, AxiomKind::Leq);
        assert!(s.resolve_ref("wb.rhs").is_some());
        assert!(s.resolve_ref("t").is_some());
        assert!(s.resolve_ref("wb.mid").is_none());
    }
}
