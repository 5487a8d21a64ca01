use super::*;
use std::fmt::Write;

fn lit(l: &AgreementLiteral) -> String {
    let neg = if l.polarity == Polarity::Neg { "!" } else { "" };
    format!("{}agree({}@{}, {}@{})", neg, l.attr_l, l.pos_l, l.attr_r, l.pos_r)
}

/// Render a signature in the DSL accepted by [`parse_signature`].
pub fn print_signature(sig: &Signature) -> String {
    let mut s = String::new();
    for o in &sig.objects {
        let kw = if o.sort == Sort::Entity { "entity" } else { "data" };
        writeln!(s, "{} {}", kw, o.name).unwrap();
    }
    for a in &sig.attributes {
        writeln!(s, "attr {} : {} -> {}", a.name, a.carrier, a.value).unwrap();
    }
    for g in &sig.generators {
        writeln!(s, "gen {} : {} -> {}", g.name, g.domain.join(" * "), g.codomain.join(" * ")).unwrap();
        if !g.pre.is_empty() {
            writeln!(s, "  pre {}", g.pre.iter().map(lit).collect::<Vec<_>>().join(" ")).unwrap();
        }
        if !g.post.is_empty() {
            writeln!(s, "  post {}", g.post.iter().map(lit).collect::<Vec<_>>().join(" ")).unwrap();
        }
    }
    for a in &sig.axioms {
        let op = if a.kind == AxiomKind::Equal { "=" } else { "<=" };
        writeln!(s, "axiom {} : {} {} {}", a.name, a.lhs, op, a.rhs).unwrap();
    }
    for t in &sig.terms {
        writeln!(s, "term {} = {}", t.name, t.term).unwrap();
    }
    s
}
