use super::pose::Pose;
use super::shape::{disjoint, Shape};
use super::GeomError;
use nalgebra::{UnitQuaternion, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tolerance for comparing parameter points.
pub const TOL: f64 = 1e-9;

/// Parameter space of a primitive object.
#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    /// Axis-aligned box `lo <= p <= hi`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Finitely many points.
    Finite { points: Vec<Vec<f64>> },
}

/// Registered structure maps `R^n -> Pose^k`.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `k = 0`.
    Value,
    /// `(x, y)` at height `z`, one pose per height, all sharing `(x, y)`.
    Planar { heights: Vec<f64> },
    /// `(x, y, z, roll, pitch, yaw)`.
    Free,
    /// `(x, y, z)` for the first body, the second offset by `dx` along x.
    Offset { dx: f64 },
    /// No parameters, one fixed pose.
    Fixed(Pose),
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Primitive { space: Space, family: Family },
    Tensor(Box<GeomObject>, Box<GeomObject>),
}

/// A body list with a parameter space and a structure map.
#[derive(Clone, Debug, PartialEq)]
pub struct GeomObject {
    pub name: String,
    pub simples: Vec<Shape>,
    pub param_dim: usize,
    kind: Kind,
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOL)
}

pub(crate) fn points_close(a: &[f64], b: &[f64]) -> bool {
    close(a, b)
}

impl GeomObject {
    /// The monoidal unit: no bodies, no parameters.
    pub fn unit() -> GeomObject {
        GeomObject { name: "I".into(), simples: vec![], param_dim: 0, kind: Kind::Primitive { space: Space::Box { lo: vec![], hi: vec![] }, family: Family::Value } }
    }

    pub fn is_value(&self) -> bool {
        self.simples.is_empty()
    }

    /// Number of poses the structure map produces.
    pub fn k(&self) -> usize {
        self.simples.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.param_dim || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match &self.kind {
            Kind::Primitive { space: Space::Box { lo, hi }, .. } => p.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| *x >= l - TOL && *x <= h + TOL),
            Kind::Primitive { space: Space::Finite { points }, .. } => points.iter().any(|q| close(p, q)),
            Kind::Tensor(a, b) => {
                let (pa, pb) = p.split_at(a.param_dim);
                a.contains(pa) && b.contains(pb) && cross_disjoint(a, &a.poses(pa), b, &b.poses(pb))
            }
        }
    }

    /// `theta(p)`: one pose per simple.
    pub fn poses(&self, p: &[f64]) -> Vec<Pose> {
        match &self.kind {
            Kind::Primitive { family, .. } => match family {
                Family::Value => vec![],
                Family::Planar { heights } => heights.iter().map(|z| Pose::at(p[0], p[1], *z)).collect(),
                Family::Free => vec![Pose::new(UnitQuaternion::from_euler_angles(p[3], p[4], p[5]), Vector3::new(p[0], p[1], p[2]))],
                Family::Offset { dx } => vec![Pose::at(p[0], p[1], p[2]), Pose::at(p[0] + dx, p[1], p[2])],
                Family::Fixed(pose) => vec![*pose],
            },
            Kind::Tensor(a, b) => {
                let (pa, pb) = p.split_at(a.param_dim);
                let mut v = a.poses(pa);
                v.extend(b.poses(pb));
                v
            }
        }
    }

    /// Factors of a tensor, left to right; a primitive is its own factor.
    pub fn factors(&self) -> Vec<&GeomObject> {
        match &self.kind {
            Kind::Tensor(a, b) => {
                let mut v = a.factors();
                v.extend(b.factors());
                v
            }
            Kind::Primitive { .. } => vec![self],
        }
    }

    /// A uniformly drawn member, or `None` after repeated rejection.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<Vec<f64>> {
        for _ in 0..1000 {
            let p = self.draw(rng);
            if self.contains(&p) {
                return Some(p);
            }
        }
        None
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.kind {
            Kind::Primitive { space: Space::Box { lo, hi }, .. } => lo.iter().zip(hi).map(|(l, h)| if h > l { rng.gen_range(*l..=*h) } else { *l }).collect(),
            Kind::Primitive { space: Space::Finite { points }, .. } => points[rng.gen_range(0..points.len())].clone(),
            Kind::Tensor(a, b) => {
                let mut p = a.draw(rng);
                p.extend(b.draw(rng));
                p
            }
        }
    }

    /// Pairs of its own simples that overlap at `p`.
    pub fn self_overlap(&self, p: &[f64]) -> Option<(usize, usize)> {
        overlap(&self.simples, &self.poses(p))
    }
}

/// First overlapping pair among posed simples.
pub(crate) fn overlap(simples: &[Shape], poses: &[Pose]) -> Option<(usize, usize)> {
    for i in 0..simples.len() {
        for j in i + 1..simples.len() {
            if !disjoint(&simples[i], &poses[i], &simples[j], &poses[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn cross_disjoint(a: &GeomObject, pa: &[Pose], b: &GeomObject, pb: &[Pose]) -> bool {
    a.simples.iter().zip(pa).all(|(sa, qa)| b.simples.iter().zip(pb).all(|(sb, qb)| disjoint(sa, qa, sb, qb)))
}

/// `X (x) Y`: bodies concatenated, parameters paired, restricted to pairs
/// whose bodies do not meet.
pub fn tensor_objects(x: &GeomObject, y: &GeomObject) -> GeomObject {
    if x.param_dim == 0 && x.simples.is_empty() {
        return y.clone();
    }
    if y.param_dim == 0 && y.simples.is_empty() {
        return x.clone();
    }
    let mut simples = x.simples.clone();
    simples.extend(y.simples.iter().cloned());
    GeomObject {
        name: format!("{} * {}", x.name, y.name),
        simples,
        param_dim: x.param_dim + y.param_dim,
        kind: Kind::Tensor(Box::new(x.clone()), Box::new(y.clone())),
    }
}

/// Tensor of a list, `unit()` when empty.
pub fn tensor_all(xs: &[GeomObject]) -> GeomObject {
    xs.iter().fold(GeomObject::unit(), |acc, x| tensor_objects(&acc, x))
}

fn need(model: &str, c: &[f64], n: &[usize]) -> Result<(), GeomError> {
    if n.contains(&c.len()) {
        Ok(())
    } else {
        Err(GeomError::BadConstants { model: model.into(), msg: format!("expected {:?} constants, found {}", n, c.len()) })
    }
}

fn bounds(model: &str, lo: &[f64], hi: &[f64]) -> Result<(), GeomError> {
    if lo.iter().zip(hi).all(|(l, h)| l <= h && l.is_finite() && h.is_finite()) {
        Ok(())
    } else {
        Err(GeomError::BadConstants { model: model.into(), msg: "empty or unbounded parameter box".into() })
    }
}

fn primitive(name: &str, simples: Vec<Shape>, space: Space, family: Family) -> Result<GeomObject, GeomError> {
    if let Some(s) = simples.iter().find(|s| !s.is_valid()) {
        return Err(GeomError::BadConstants { model: name.into(), msg: format!("shape sizes must be positive: {:?}", s) });
    }
    let param_dim = match &space {
        Space::Box { lo, .. } => lo.len(),
        Space::Finite { points } => points.first().map_or(0, Vec::len),
    };
    let o = GeomObject { name: name.into(), simples, param_dim, kind: Kind::Primitive { space, family } };
    // bodies of one object may never meet
    if o.simples.len() > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..256 {
            let p = o.draw(&mut rng);
            if let Some((i, j)) = o.self_overlap(&p) {
                return Err(GeomError::SelfOverlap { model: name.into(), param: p, i, j });
            }
        }
    }
    Ok(o)
}

/// Registered object models and their constants:
///
/// - `point-robot-2d (r, x0, x1, y0, y1 [, z])`: sphere at `(x, y, z)`
/// - `carried-pair-2d (r1, r2, x0, x1, y0, y1, z1, z2)`: two spheres stacked over `(x, y)`
/// - `free-body-3d (hx, hy, hz, lo, hi)`: box with position in `[lo, hi]^3` and any orientation
/// - `sphere-pair-3d (r, dx, lo, hi)`: two spheres `dx` apart along x
/// - `static-sphere-3d (r, x, y, z)`: fixed sphere, no parameters
/// - `value-box (lo1, hi1, lo2, hi2, ...)`: value space, no bodies
/// - `value-finite (n, v...)`: value space of finitely many points in `R^n`
pub fn instantiate_object(model: &str, c: &[f64]) -> Result<GeomObject, GeomError> {
    let sphere = |r: f64| Shape::Sphere { radius: r };
    match model {
        "point-robot-2d" => {
            need(model, c, &[5, 6])?;
            bounds(model, &[c[1], c[3]], &[c[2], c[4]])?;
            let z = c.get(5).copied().unwrap_or(0.0);
            primitive(model, vec![sphere(c[0])], Space::Box { lo: vec![c[1], c[3]], hi: vec![c[2], c[4]] }, Family::Planar { heights: vec![z] })
        }
        "carried-pair-2d" => {
            need(model, c, &[8])?;
            bounds(model, &[c[2], c[4]], &[c[3], c[5]])?;
            primitive(model, vec![sphere(c[0]), sphere(c[1])], Space::Box { lo: vec![c[2], c[4]], hi: vec![c[3], c[5]] }, Family::Planar { heights: vec![c[6], c[7]] })
        }
        "free-body-3d" => {
            need(model, c, &[5])?;
            bounds(model, &[c[3]], &[c[4]])?;
            let pi = std::f64::consts::PI;
            let h = pi / 2.0;
            primitive(
                model,
                vec![Shape::Box { half: Vector3::new(c[0], c[1], c[2]) }],
                Space::Box { lo: vec![c[3], c[3], c[3], -pi, -h, -pi], hi: vec![c[4], c[4], c[4], pi, h, pi] },
                Family::Free,
            )
        }
        "sphere-pair-3d" => {
            need(model, c, &[4])?;
            bounds(model, &[c[2]], &[c[3]])?;
            primitive(model, vec![sphere(c[0]), sphere(c[0])], Space::Box { lo: vec![c[2]; 3], hi: vec![c[3]; 3] }, Family::Offset { dx: c[1] })
        }
        "static-sphere-3d" => {
            need(model, c, &[4])?;
            primitive(model, vec![sphere(c[0])], Space::Box { lo: vec![], hi: vec![] }, Family::Fixed(Pose::at(c[1], c[2], c[3])))
        }
        "value-box" => {
            if !c.len().is_multiple_of(2) {
                return Err(GeomError::BadConstants { model: model.into(), msg: "expected lo/hi pairs".into() });
            }
            let lo: Vec<f64> = c.iter().step_by(2).copied().collect();
            let hi: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
            bounds(model, &lo, &hi)?;
            primitive(model, vec![], Space::Box { lo, hi }, Family::Value)
        }
        "value-finite" => {
            let n = c.first().copied().unwrap_or(0.0);
            if n < 1.0 || n.fract() != 0.0 || !(c.len() - 1).is_multiple_of(n as usize) || c.len() == 1 {
                return Err(GeomError::BadConstants { model: model.into(), msg: "expected a dimension followed by whole points".into() });
            }
            let points = c[1..].chunks(n as usize).map(<[f64]>::to_vec).collect();
            primitive(model, vec![], Space::Finite { points }, Family::Value)
        }
        _ => Err(GeomError::UnknownModel(model.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_robot_is_one_sphere_in_the_plane() {
        let o = instantiate_object("point-robot-2d", &[0.1, 0.0, 10.0, 0.0, 10.0]).unwrap();
        assert_eq!(o.simples.len(), 1);
        assert_eq!(o.param_dim, 2);
        assert!(o.contains(&[5.0, 10.0]));
        assert!(!o.contains(&[5.0, 10.5]));
        assert_eq!(o.poses(&[1.0, 2.0])[0], Pose::at(1.0, 2.0, 0.0));
    }

    #[test]
    fn value_spaces_have_no_bodies() {
        let v = instantiate_object("value-box", &[0.0, 10.0, 0.0, 10.0]).unwrap();
        assert!(v.is_value());
        assert_eq!(v.param_dim, 2);
        let f = instantiate_object("value-finite", &[1.0, 0.0, 1.0, 2.0]).unwrap();
        assert!(f.contains(&[2.0]) && !f.contains(&[1.5]));
    }

    #[test]
    fn overlapping_bodies_are_rejected() {
        let e = instantiate_object("sphere-pair-3d", &[1.0, 1.5, 0.0, 5.0]).unwrap_err();
        assert!(matches!(e, GeomError::SelfOverlap { i: 0, j: 1, .. }), "{}", e);
        assert!(instantiate_object("sphere-pair-3d", &[1.0, 2.5, 0.0, 5.0]).is_ok());
        assert!(matches!(instantiate_object("point-robot-2d", &[-0.1, 0.0, 1.0, 0.0, 1.0]), Err(GeomError::BadConstants { .. })));
        assert!(matches!(instantiate_object("teapot", &[]), Err(GeomError::UnknownModel(_))));
    }

    #[test]
    fn tensor_excludes_meeting_bodies() {
        let s = instantiate_object("sphere-pair-3d", &[1.0, 3.0, -10.0, 10.0]).unwrap();
        let a = instantiate_object("point-robot-2d", &[1.0, -10.0, 10.0, -10.0, 10.0]).unwrap();
        let t = tensor_objects(&a, &a);
        assert_eq!(t.simples.len(), 2);
        assert!(!t.contains(&[0.0, 0.0, 1.0, 0.0]));
        assert!(t.contains(&[0.0, 0.0, 3.0, 0.0]));
        let v = instantiate_object("value-box", &[0.0, 1.0]).unwrap();
        let av = tensor_objects(&a, &v);
        assert!(av.contains(&[0.0, 0.0, 0.5]));
        assert_eq!(tensor_objects(&GeomObject::unit(), &s), s);
    }
}
