//! Attribute signatures: entity and data objects, attributes, generators with
//! agreement pre/post conditions, and named axioms between diagram terms.

mod parse;
mod print;
mod validate;

pub use parse::{parse_signature, parse_terms_into};
pub use print::print_signature;
pub use validate::validate_signature;

use crate::term::Term;
use thiserror::Error;

/// Source line of a declaration. Compares equal to every other `SrcLine`, so
/// structural equality of signatures ignores positions.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct SrcLine(pub usize);

impl PartialEq for SrcLine {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Entity,
    Data,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    pub sort: Sort,
    pub line: SrcLine,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub carrier: String,
    pub value: String,
    pub line: SrcLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Pos,
    Neg,
}

/// `agree(attr_l@pos_l, attr_r@pos_r)`. Positions index the generator's
/// parameter list (see [`GeneratorDecl::params`]); `copy` names the implicit
/// copy attribute of whatever data object sits at that position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgreementLiteral {
    pub polarity: Polarity,
    pub attr_l: String,
    pub pos_l: usize,
    pub attr_r: String,
    pub pos_r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub pre: Vec<AgreementLiteral>,
    pub post: Vec<AgreementLiteral>,
    pub line: SrcLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    Equal,
    Leq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomDecl {
    pub name: String,
    pub kind: AxiomKind,
    pub lhs: Term,
    pub rhs: Term,
    pub line: SrcLine,
}

/// A named term (`term <name> = <term>`), referenced as `@name`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDecl {
    pub name: String,
    pub term: Term,
    pub line: SrcLine,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub objects: Vec<ObjectDecl>,
    pub attributes: Vec<AttributeDecl>,
    pub generators: Vec<GeneratorDecl>,
    pub axioms: Vec<AxiomDecl>,
    pub terms: Vec<TermDecl>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate name '{name}' at line {line}")]
    Duplicate { name: String, line: usize },
    #[error("unknown reference '{name}' at line {line}")]
    UnknownRef { name: String, line: usize },
}

/// Resolved view of an attribute, including implicit `copy:D` attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttrInfo {
    pub name: String,
    pub carrier: String,
    pub value: String,
    pub is_copy: bool,
}

/// Where a generator parameter lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamPort {
    /// Domain port `i`; `through` is the codomain port it passes through to, if any.
    Domain { index: usize, through: Option<usize> },
    /// Codomain entity port not identified with any domain port.
    Codomain { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub ty: String,
    pub port: ParamPort,
}

impl GeneratorDecl {
    /// Parameter list: all domain ports in order, then every codomain entity
    /// port that does not pass through a domain port. A codomain port passes
    /// through the first unclaimed domain port of the same type.
    pub fn params(&self, sig: &Signature) -> Vec<Param> {
        let mut through: Vec<Option<usize>> = vec![None; self.domain.len()];
        let mut fresh = Vec::new();
        for (j, ty) in self.codomain.iter().enumerate() {
            let claim = (0..self.domain.len()).find(|&i| through[i].is_none() && &self.domain[i] == ty);
            match claim {
                Some(i) => through[i] = Some(j),
                None => {
                    if sig.sort_of(ty) == Some(Sort::Entity) {
                        fresh.push(Param { ty: ty.clone(), port: ParamPort::Codomain { index: j } });
                    }
                }
            }
        }
        let mut out: Vec<Param> = self
            .domain
            .iter()
            .enumerate()
            .map(|(i, ty)| Param { ty: ty.clone(), port: ParamPort::Domain { index: i, through: through[i] } })
            .collect();
        out.extend(fresh);
        out
    }
}

impl Signature {
    pub fn object(&self, name: &str) -> Option<&ObjectDecl> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.object(name).map(|o| o.sort)
    }

    pub fn is_data(&self, name: &str) -> bool {
        self.sort_of(name) == Some(Sort::Data)
    }

    pub fn generator(&self, name: &str) -> Option<&GeneratorDecl> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomDecl> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn data_objects(&self) -> impl Iterator<Item = &ObjectDecl> {
        self.objects.iter().filter(|o| o.sort == Sort::Data)
    }

    /// Resolve an attribute reference: a declared name or `copy:D`.
    pub fn attr_info(&self, name: &str) -> Option<AttrInfo> {
        if let Some(d) = name.strip_prefix("copy:") {
            return self.is_data(d).then(|| AttrInfo {
                name: name.to_string(),
                carrier: d.to_string(),
                value: d.to_string(),
                is_copy: true,
            });
        }
        self.attributes.iter().find(|a| a.name == name).map(|a| AttrInfo {
            name: a.name.clone(),
            carrier: a.carrier.clone(),
            value: a.value.clone(),
            is_copy: false,
        })
    }

    /// Resolve a literal's attribute against the type of the port it names.
    /// Bare `copy` becomes `copy:<port type>`.
    pub fn literal_attr(&self, attr: &str, port_ty: &str) -> Option<AttrInfo> {
        if attr == "copy" {
            return self.attr_info(&format!("copy:{}", port_ty));
        }
        self.attr_info(attr)
    }

    /// Look up `@name`: `axiom.lhs`, `axiom.rhs`, or a stored term.
    pub fn resolve_ref(&self, name: &str) -> Option<&Term> {
        if let Some((ax, side)) = name.split_once('.') {
            let a = self.axiom(ax)?;
            return match side {
                "lhs" => Some(&a.lhs),
                "rhs" => Some(&a.rhs),
                _ => None,
            };
        }
        self.terms.iter().find(|t| t.name == name).map(|t| &t.term)
    }

    /// Generators `f : D -> D'` between single data objects.
    pub fn data_generators(&self) -> impl Iterator<Item = &GeneratorDecl> {
        self.generators.iter().filter(move |g| {
            g.domain.len() == 1 && g.codomain.len() == 1 && self.is_data(&g.domain[0]) && self.is_data(&g.codomain[0])
        })
    }
}
