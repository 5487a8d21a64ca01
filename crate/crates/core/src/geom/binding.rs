use super::morphism::GeomMorphism;
use super::object::{instantiate_object, points_close, tensor_all, GeomObject};
use super::GeomError;
use crate::signature::Signature;
use std::collections::BTreeMap;

/// `bind obj <Type> = <model> (<constants>)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjBinding {
    pub model: String,
    pub consts: Vec<f64>,
    pub object: GeomObject,
}

/// `bind gen <Gen> = <family> (<constants>)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenBinding {
    pub family: String,
    pub consts: Vec<f64>,
}

/// Geometric models for the names of a signature, plus initial parameters
/// for problem objects.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Binding {
    pub objects: BTreeMap<String, ObjBinding>,
    pub gens: BTreeMap<String, GenBinding>,
    /// Attribute value as a slice `start..start + len` of the carrier's parameters.
    pub attrs: BTreeMap<String, (usize, usize)>,
    pub init: BTreeMap<String, Vec<f64>>,
}

const FAMILIES: [&str; 4] = ["move-to", "attach", "detach", "wait"];

fn syntax(line: usize, msg: impl Into<String>) -> GeomError {
    GeomError::BindingSyntax { line, msg: msg.into() }
}

/// `(a, b, ...)` as numbers.
fn numbers(s: &str, line: usize) -> Result<Vec<f64>, GeomError> {
    let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(|| syntax(line, format!("expected a parenthesized list, found '{}'", s.trim())))?;
    if inner.trim().is_empty() {
        return Ok(vec![]);
    }
    inner.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| syntax(line, format!("not a number: '{}'", x.trim())))).collect()
}

/// `<name> = <model> (<constants>)` or `<name> = (<numbers>)`.
fn assignment(rest: &str, line: usize) -> Result<(String, String, Vec<f64>), GeomError> {
    let (name, rhs) = rest.split_once('=').ok_or_else(|| syntax(line, "expected '='"))?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(syntax(line, format!("bad name '{}'", name)));
    }
    let rhs = rhs.trim();
    let open = rhs.find('(').ok_or_else(|| syntax(line, "expected '('"))?;
    Ok((name.to_string(), rhs[..open].trim().to_string(), numbers(&rhs[open..], line)?))
}

pub fn parse_binding(text: &str) -> Result<Binding, GeomError> {
    let mut b = Binding::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap().trim();
        if l.is_empty() {
            continue;
        }
        let (head, rest) = l.split_once(char::is_whitespace).ok_or_else(|| syntax(line, format!("incomplete line '{}'", l)))?;
        let (kind, rest) = if head == "bind" {
            let (k, r) = rest.trim().split_once(char::is_whitespace).ok_or_else(|| syntax(line, "expected 'obj', 'gen' or 'attr'"))?;
            (k, r)
        } else {
            (head, rest)
        };
        let (name, model, consts) = assignment(rest, line)?;
        let dup = match kind {
            "obj" => {
                let object = instantiate_object(&model, &consts)?;
                b.objects.insert(name.clone(), ObjBinding { model, consts, object }).is_some()
            }
            "gen" => {
                if !FAMILIES.contains(&model.as_str()) {
                    return Err(GeomError::UnknownFamily(model));
                }
                if consts.len() != 1 || !(consts[0] >= 0.0 && consts[0].is_finite()) {
                    return Err(syntax(line, format!("family '{}' takes one duration >= 0", model)));
                }
                b.gens.insert(name.clone(), GenBinding { family: model, consts }).is_some()
            }
            "attr" => {
                let ok = model == "project" && consts.len() == 2 && consts.iter().all(|c| *c >= 0.0 && c.fract() == 0.0);
                if !ok {
                    return Err(syntax(line, "attributes bind as 'project (start, len)'"));
                }
                b.attrs.insert(name.clone(), (consts[0] as usize, consts[1] as usize)).is_some()
            }
            "init" if model.is_empty() => b.init.insert(name.clone(), consts).is_some(),
            _ => return Err(syntax(line, format!("unknown declaration '{}'", l))),
        };
        if dup {
            return Err(syntax(line, format!("'{}' is bound twice", name)));
        }
    }
    Ok(b)
}

impl Binding {
    pub fn object(&self, ty: &str) -> Result<&GeomObject, GeomError> {
        self.objects.get(ty).map(|o| &o.object).ok_or_else(|| GeomError::Unbound(format!("object {}", ty)))
    }

    /// Tensor of the bound objects for a list of types.
    pub fn objects_of(&self, tys: &[String]) -> Result<GeomObject, GeomError> {
        let xs = tys.iter().map(|t| self.object(t).cloned()).collect::<Result<Vec<_>, _>>()?;
        Ok(tensor_all(&xs))
    }

    /// The value of attribute `attr` at carrier parameter `p`.
    pub fn project(&self, attr: &str, p: &[f64]) -> Result<Vec<f64>, GeomError> {
        let (s, n) = *self.attrs.get(attr).ok_or_else(|| GeomError::Unbound(format!("attribute {}", attr)))?;
        p.get(s..s + n).map(<[f64]>::to_vec).ok_or_else(|| GeomError::BindMismatch(format!("attribute {} projects {}..{} of a {}-dimensional parameter", attr, s, s + n, p.len())))
    }

    /// The single attribute on `carrier` (with value type `value`, if given).
    fn attr_on(&self, sig: &Signature, gen: &str, carrier: &str, value: Option<&str>) -> Result<String, GeomError> {
        let found: Vec<&str> = sig.attributes.iter().filter(|a| a.carrier == carrier && value.is_none_or(|v| a.value == v)).map(|a| a.name.as_str()).collect();
        match found.as_slice() {
            [a] => Ok(a.to_string()),
            _ => Err(GeomError::BindMismatch(format!("{}: need exactly one attribute on {}, found {}", gen, carrier, found.len()))),
        }
    }

    /// Check every bound name against the signature and every attribute
    /// slice against its objects.
    pub fn check(&self, sig: &Signature) -> Result<(), GeomError> {
        for o in &sig.objects {
            self.object(&o.name)?;
        }
        for a in &sig.attributes {
            let (s, n) = *self.attrs.get(&a.name).ok_or_else(|| GeomError::Unbound(format!("attribute {}", a.name)))?;
            let (c, v) = (self.object(&a.carrier)?, self.object(&a.value)?);
            if s + n > c.param_dim || n != v.param_dim || !v.is_value() {
                return Err(GeomError::BindMismatch(format!("attribute {} = project ({}, {}) does not fit {} -> {}", a.name, s, n, a.carrier, a.value)));
            }
        }
        for g in &sig.generators {
            self.morphism(&g.name, sig)?;
        }
        Ok(())
    }

    /// The morphism bound to a generator, between the tensors of its
    /// domain and codomain objects.
    pub fn morphism(&self, gen: &str, sig: &Signature) -> Result<GeomMorphism, GeomError> {
        let g = sig.generator(gen).ok_or_else(|| GeomError::Unbound(format!("generator {}", gen)))?;
        let gb = self.gens.get(gen).ok_or_else(|| GeomError::Unbound(format!("generator {}", gen)))?;
        let t = gb.consts[0];
        let dom = self.objects_of(&g.domain)?;
        let cod = self.objects_of(&g.codomain)?;
        let shape = |ok: bool, want: &str| {
            if ok {
                Ok(())
            } else {
                Err(GeomError::BindMismatch(format!("{} bound to {} needs {}, found {:?} -> {:?}", gen, gb.family, want, g.domain, g.codomain)))
            }
        };
        if dom.k() != cod.k() {
            return Err(GeomError::BindMismatch(format!("{}: domain has {} bodies, codomain {}", gen, dom.k(), cod.k())));
        }
        let m = match gb.family.as_str() {
            "move-to" => {
                shape(g.domain.len() == 2 && g.codomain == g.domain[..1], "X * D -> X")?;
                let a = self.attr_on(sig, gen, &g.domain[0], Some(&g.domain[1]))?;
                let (s, n) = *self.attrs.get(&a).ok_or_else(|| GeomError::Unbound(format!("attribute {}", a)))?;
                let dx = self.object(&g.domain[0])?.param_dim;
                GeomMorphism::straight(dom, cod, t, move |p| {
                    let mut q = p[..dx].to_vec();
                    q[s..s + n].copy_from_slice(&p[dx..]);
                    Some(q)
                })
            }
            "attach" => {
                shape(g.domain.len() == 2 && g.codomain.len() == 1, "X * Y -> Z")?;
                let (x, y) = (self.object(&g.domain[0])?.param_dim, self.object(&g.domain[1])?.param_dim);
                shape(cod.param_dim == x, "Z with the parameters of X")?;
                let ax = self.attr_on(sig, gen, &g.domain[0], None)?;
                let ay = self.attr_on(sig, gen, &g.domain[1], None)?;
                let me = self.clone();
                me.project(&ax, &vec![0.0; x])?;
                me.project(&ay, &vec![0.0; y])?;
                GeomMorphism::straight(dom, cod, t, move |p| {
                    let (px, py) = p.split_at(x);
                    let same = points_close(&me.project(&ax, px).ok()?, &me.project(&ay, py).ok()?);
                    same.then(|| px.to_vec())
                })
            }
            "detach" => {
                shape(g.domain.len() == 1 && g.codomain.len() == 2, "Z -> X * Y")?;
                let z = dom.param_dim;
                let each = [self.object(&g.codomain[0])?.param_dim, self.object(&g.codomain[1])?.param_dim];
                shape(each == [z, z], "X and Y with the parameters of Z")?;
                GeomMorphism::straight(dom, cod, t, |p| Some([p, p].concat()))
            }
            _ => {
                shape(g.domain == g.codomain, "X -> X")?;
                GeomMorphism::straight(dom, cod, t, |p| Some(p.to_vec()))
            }
        };
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_line_kinds() {
        let b = parse_binding("# models\nbind obj Loc = value-box (0, 10, 0, 10)\nbind gen Go = move-to (1.5)\nbind attr at = project (0, 2)\ninit r = (1, 2)\n").unwrap();
        assert_eq!(b.objects["Loc"].object.param_dim, 2);
        assert_eq!(b.gens["Go"], GenBinding { family: "move-to".into(), consts: vec![1.5] });
        assert_eq!(b.attrs["at"], (0, 2));
        assert_eq!(b.init["r"], vec![1.0, 2.0]);
    }

    #[test]
    fn reports_bad_lines() {
        assert!(matches!(parse_binding("bind obj X = teapot ()"), Err(GeomError::UnknownModel(_))));
        assert!(matches!(parse_binding("bind gen G = fly (1)"), Err(GeomError::UnknownFamily(_))));
        assert!(matches!(parse_binding("\nbind gen G = wait (1, 2)"), Err(GeomError::BindingSyntax { line: 2, .. })));
        assert!(matches!(parse_binding("init r = (1, x)"), Err(GeomError::BindingSyntax { line: 1, .. })));
        assert!(matches!(parse_binding("init r = (1)\ninit r = (2)"), Err(GeomError::BindingSyntax { line: 2, .. })));
    }
}
