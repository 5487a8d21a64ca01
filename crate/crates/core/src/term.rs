//! Diagram terms: the textual syntax shared by signature axioms, the CLI and tests.
//!
//! `;` is sequential composition, `*` is tensor and binds tighter than `;`.
//! The implicit copy attribute of a data object `D` is written `copy:D`.

use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Id(String),
    Swap(String, String),
    Mu(String),
    Delta(String),
    Eps(String),
    Get(String),
    Set(String),
    Chi(String, String),
    Gen(String),
    /// `@name`, resolved against axioms and stored terms during elaboration.
    Ref(String),
    Seq(Vec<Term>),
    Par(Vec<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("term syntax error at column {col}: {msg}")]
pub struct TermError {
    pub col: usize,
    pub msg: String,
}

pub fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TermError> {
        Err(TermError { col: self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c))
        }
    }

    fn ident(&mut self) -> Result<String, TermError> {
        self.skip_ws();
        let start = self.pos;
        for c in self.text[self.pos..].chars() {
            if is_ident_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let s = &self.text[start..self.pos];
        if !is_ident(s) {
            self.pos = start;
            return self.err("expected identifier");
        }
        Ok(s.to_string())
    }

    // attribute reference: ident or copy:ident
    fn attr(&mut self) -> Result<String, TermError> {
        let a = self.ident()?;
        if a == "copy" && self.eat(':') {
            let d = self.ident()?;
            return Ok(format!("copy:{}", d));
        }
        Ok(a)
    }

    fn seq(&mut self) -> Result<Term, TermError> {
        let mut items = vec![self.par()?];
        while self.eat(';') {
            items.push(self.par()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Term::Seq(items) })
    }

    fn par(&mut self) -> Result<Term, TermError> {
        let mut items = vec![self.atom()?];
        while self.eat('*') {
            items.push(self.atom()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Term::Par(items) })
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        if self.eat('(') {
            let t = self.seq()?;
            self.expect(')')?;
            return Ok(t);
        }
        if self.eat('@') {
            let mut name = self.ident()?;
            // @axiom.lhs / @axiom.rhs
            if self.text[self.pos..].starts_with('.') {
                self.pos += 1;
                let side = self.ident()?;
                name = format!("{}.{}", name, side);
            }
            return Ok(Term::Ref(name));
        }
        let head = self.ident()?;
        let prim = matches!(
            head.as_str(),
            "id" | "swap" | "mu" | "delta" | "eps" | "get" | "set" | "chi"
        );
        if !(prim && self.eat('[')) {
            return Ok(Term::Gen(head));
        }
        let t = match head.as_str() {
            "id" => Term::Id(self.ident()?),
            "mu" => Term::Mu(self.ident()?),
            "delta" => Term::Delta(self.ident()?),
            "eps" => Term::Eps(self.ident()?),
            "get" => Term::Get(self.attr()?),
            "set" => Term::Set(self.attr()?),
            "swap" => {
                let a = self.ident()?;
                self.expect(',')?;
                Term::Swap(a, self.ident()?)
            }
            "chi" => {
                let a = self.attr()?;
                self.expect(',')?;
                Term::Chi(a, self.attr()?)
            }
            _ => unreachable!(),
        };
        self.expect(']')?;
        Ok(t)
    }
}

pub fn parse_term(text: &str) -> Result<Term, TermError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    if p.peek().is_none() {
        return p.err("empty term");
    }
    let t = p.seq()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

impl Term {
    pub fn seq(items: Vec<Term>) -> Term {
        Term::Seq(items)
    }

    pub fn par(items: Vec<Term>) -> Term {
        Term::Par(items)
    }

    /// Names of `@` references, in order of first occurrence.
    pub fn refs(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs(&self, out: &mut Vec<String>) {
        match self {
            Term::Ref(n) => {
                if !out.contains(n) {
                    out.push(n.clone())
                }
            }
            Term::Seq(ts) | Term::Par(ts) => ts.iter().for_each(|t| t.collect_refs(out)),
            _ => {}
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Id(a) => write!(f, "id[{}]", a),
            Term::Swap(a, b) => write!(f, "swap[{},{}]", a, b),
            Term::Mu(d) => write!(f, "mu[{}]", d),
            Term::Delta(d) => write!(f, "delta[{}]", d),
            Term::Eps(d) => write!(f, "eps[{}]", d),
            Term::Get(a) => write!(f, "get[{}]", a),
            Term::Set(a) => write!(f, "set[{}]", a),
            Term::Chi(a, b) => write!(f, "chi[{},{}]", a, b),
            Term::Gen(g) => f.write_str(g),
            Term::Ref(r) => write!(f, "@{}", r),
            Term::Seq(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ; ")?;
                    }
                    write!(f, "{}", t)?;
                }
                Ok(())
            }
            Term::Par(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    match t {
                        Term::Seq(_) | Term::Par(_) => write!(f, "({})", t)?,
                        _ => write!(f, "{}", t)?,
                    }
                }
                Ok(())
            }
        }
    }
}
