use super::matcher::free_nets_compatible;
use super::normal::normalize;
use super::RewriteError;
use crate::diagram::hyper::{iso, Hyper};
use crate::diagram::{build_diagram, Diagram};
use crate::signature::{AxiomKind, Signature};
use crate::term::parse_term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    L2R,
    R2L,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::L2R => Dir::R2L,
            Dir::R2L => Dir::L2R,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dir::L2R => "l2r",
            Dir::R2L => "r2l",
        }
    }

    pub fn parse(s: &str) -> Option<Dir> {
        match s {
            "l2r" => Some(Dir::L2R),
            "r2l" => Some(Dir::R2L),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Equal,
    /// Usable only left-to-right, and only when proving `<=`.
    Leq,
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    pub kind: RuleKind,
    pub lhs: Diagram,
    pub rhs: Diagram,
    pub builtin: bool,
    pub(crate) raw: (Hyper, Hyper),
    /// Normalized sides; `None` when both sides share a normal form.
    pub(crate) norm: Option<(Hyper, Hyper)>,
    /// Directions in which the normalized rule can be matched.
    pub(crate) norm_dirs: Vec<Dir>,
    /// Set on `well_behaved[D]`: in normal form the rule acts by splitting nets of type D.
    pub(crate) split: Option<String>,
}

impl Rule {
    fn new(name: String, kind: RuleKind, lhs: Diagram, rhs: Diagram, builtin: bool) -> Result<Rule, RewriteError> {
        if lhs.boundary() != rhs.boundary() {
            return Err(RewriteError::BoundaryMismatch { lhs: lhs.boundary(), rhs: rhs.boundary() });
        }
        let raw_l = Hyper::from_diagram(&lhs).ok_or(RewriteError::Malformed)?;
        let raw_r = Hyper::from_diagram(&rhs).ok_or(RewriteError::Malformed)?;
        let (mut nl, mut nr) = (raw_l.clone(), raw_r.clone());
        normalize(&mut nl);
        normalize(&mut nr);
        let (norm, norm_dirs) = if iso(&nl, &nr) {
            (None, vec![])
        } else {
            let mut dirs = Vec::new();
            if !nl.nodes.is_empty() && free_nets_compatible(&nl, &nr) {
                dirs.push(Dir::L2R);
            }
            if !nr.nodes.is_empty() && free_nets_compatible(&nr, &nl) {
                dirs.push(Dir::R2L);
            }
            (Some((nl, nr)), dirs)
        };
        Ok(Rule { name, kind, lhs, rhs, builtin, raw: (raw_l, raw_r), norm, norm_dirs, split: None })
    }

    pub(crate) fn raw_sides(&self, dir: Dir) -> (&Hyper, &Hyper) {
        match dir {
            Dir::L2R => (&self.raw.0, &self.raw.1),
            Dir::R2L => (&self.raw.1, &self.raw.0),
        }
    }

    pub(crate) fn norm_sides(&self, dir: Dir) -> Option<(&Hyper, &Hyper)> {
        let (l, r) = self.norm.as_ref()?;
        Some(match dir {
            Dir::L2R => (l, r),
            Dir::R2L => (r, l),
        })
    }

    /// Participates in normal-form search (possibly as a split move).
    pub(crate) fn searchable(&self) -> bool {
        self.split.is_some() || !self.norm_dirs.is_empty()
    }
}

const DATA_RULES: &[(&str, RuleKind, &str, &str)] = &[
    ("mu_assoc", RuleKind::Equal, "(mu[D] * id[D]) ; mu[D]", "(id[D] * mu[D]) ; mu[D]"),
    ("mu_comm", RuleKind::Equal, "swap[D,D] ; mu[D]", "mu[D]"),
    ("delta_coassoc", RuleKind::Equal, "delta[D] ; (delta[D] * id[D])", "delta[D] ; (id[D] * delta[D])"),
    ("delta_cocomm", RuleKind::Equal, "delta[D] ; swap[D,D]", "delta[D]"),
    ("counit", RuleKind::Equal, "delta[D] ; (id[D] * eps[D])", "id[D]"),
    ("counit_left", RuleKind::Equal, "delta[D] ; (eps[D] * id[D])", "id[D]"),
    ("frobenius_l", RuleKind::Equal, "(delta[D] * id[D]) ; (id[D] * mu[D])", "mu[D] ; delta[D]"),
    ("frobenius_r", RuleKind::Equal, "(id[D] * delta[D]) ; (mu[D] * id[D])", "mu[D] ; delta[D]"),
    ("special", RuleKind::Equal, "delta[D] ; mu[D]", "id[D]"),
    ("well_behaved", RuleKind::Leq, "mu[D] ; delta[D]", "id[D] * id[D]"),
];

const ACTION_RULES: &[(&str, RuleKind, &str, &str)] = &[
    ("phi_def", RuleKind::Equal, "set[A]", "(get[A] * id[D]) ; (id[M] * mu[D]) ; (id[M] * eps[D])"),
    ("sg_action", RuleKind::Equal, "(id[M] * mu[D]) ; set[A]", "(set[A] * id[D]) ; set[A]"),
    ("cm_coassoc", RuleKind::Equal, "get[A] ; (get[A] * id[D])", "get[A] ; (id[M] * delta[D])"),
    ("cm_counit", RuleKind::Equal, "get[A] ; (id[M] * eps[D])", "id[M]"),
    ("frob_action_12", RuleKind::Equal, "set[A] ; get[A]", "(get[A] * id[D]) ; (id[M] * mu[D])"),
    ("frob_action_13", RuleKind::Equal, "set[A] ; get[A]", "(id[M] * delta[D]) ; (set[A] * id[D])"),
    ("special_action", RuleKind::Equal, "get[A] ; set[A]", "id[M]"),
];

const LAX_RULES: &[(&str, RuleKind, &str, &str)] = &[
    ("lax_comult", RuleKind::Leq, "F ; delta[E]", "delta[D] ; (F * F)"),
    ("lax_counit", RuleKind::Leq, "F ; eps[E]", "eps[D]"),
    ("lax_mult", RuleKind::Leq, "mu[D] ; F", "(F * F) ; mu[E]"),
];

/// Substitute whole-word placeholders.
fn instantiate(template: &str, subst: &[(&str, &str)]) -> String {
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        let w = std::mem::take(word);
        match subst.iter().find(|(k, _)| *k == w) {
            Some((_, v)) => out.push_str(v),
            None => out.push_str(&w),
        }
    };
    for c in template.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

/// Rules available for a signature: built-in data-service and action laws,
/// well-behavedness and lax-homomorphism inequalities, the signature's
/// axioms, and for each axiom the variants obtained by discarding a nonempty
/// subset of its data outputs on both sides (named `<axiom>~eps{i,..}`).
#[derive(Clone, Debug)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn for_signature(sig: &Signature) -> Result<RuleSet, RewriteError> {
        let mut rules = Vec::new();
        let add_template = |name: String, kind: RuleKind, l: &str, r: &str, rules: &mut Vec<Rule>| -> Result<(), RewriteError> {
            let lt = parse_term(l).expect("built-in template parses");
            let rt = parse_term(r).expect("built-in template parses");
            let ld = build_diagram(&lt, sig)?;
            let rd = build_diagram(&rt, sig)?;
            rules.push(Rule::new(name, kind, ld, rd, true)?);
            Ok(())
        };
        for d in sig.data_objects() {
            for (n, k, l, r) in DATA_RULES {
                let s = [("D", d.name.as_str())];
                add_template(format!("{}[{}]", n, d.name), *k, &instantiate(l, &s), &instantiate(r, &s), &mut rules)?;
                if *n == "well_behaved" {
                    rules.last_mut().unwrap().split = Some(d.name.clone());
                }
            }
        }
        for a in &sig.attributes {
            if !sig.is_data(&a.value) {
                continue;
            }
            for (n, k, l, r) in ACTION_RULES {
                let s = [("A", a.name.as_str()), ("M", a.carrier.as_str()), ("D", a.value.as_str())];
                add_template(format!("{}[{}]", n, a.name), *k, &instantiate(l, &s), &instantiate(r, &s), &mut rules)?;
            }
        }
        for g in sig.data_generators() {
            for (n, k, l, r) in LAX_RULES {
                let s = [("F", g.name.as_str()), ("D", g.domain[0].as_str()), ("E", g.codomain[0].as_str())];
                add_template(format!("{}[{}]", n, g.name), *k, &instantiate(l, &s), &instantiate(r, &s), &mut rules)?;
            }
        }
        for ax in &sig.axioms {
            let kind = if ax.kind == AxiomKind::Equal { RuleKind::Equal } else { RuleKind::Leq };
            let ld = build_diagram(&ax.lhs, sig)?;
            let rd = build_diagram(&ax.rhs, sig)?;
            let base = Rule::new(ax.name.clone(), kind, ld.clone(), rd.clone(), false)?;
            rules.push(base);
            let data_outs: Vec<usize> = (0..ld.outputs.len()).filter(|&j| sig.is_data(&ld.outputs[j])).collect();
            if data_outs.is_empty() || data_outs.len() > 4 {
                continue;
            }
            for mask in 1u32..(1 << data_outs.len()) {
                let chosen: Vec<usize> = (0..data_outs.len()).filter(|b| mask & (1 << b) != 0).map(|b| data_outs[b]).collect();
                let mut post = Diagram::default();
                for (j, ty) in ld.outputs.iter().enumerate() {
                    let piece = if chosen.contains(&j) {
                        build_diagram(&crate::term::Term::Eps(ty.clone()), sig)?
                    } else {
                        Diagram::identity(std::slice::from_ref(ty))
                    };
                    post = post.tensor(&piece);
                }
                let name = format!(
                    "{}~eps{{{}}}",
                    ax.name,
                    chosen.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(",")
                );
                let v = Rule::new(name, kind, ld.then(&post)?, rd.then(&post)?, false)?;
                if v.norm.is_some() {
                    rules.push(v);
                }
            }
        }
        Ok(RuleSet { rules })
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}
