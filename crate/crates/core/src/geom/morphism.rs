use super::object::{overlap, points_close, tensor_all, GeomObject, TOL};
use super::pose::Pose;
use super::GeomError;
use crate::par::Exec;
use crate::Finding;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::Arc;

type ParamFn = Arc<dyn Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync>;
type PathFn = Arc<dyn Fn(&[f64], f64) -> Vec<Pose> + Send + Sync>;

/// A timed partial path `(Phi, phi, T)` between objects.
#[derive(Clone)]
pub struct GeomMorphism {
    pub dom: GeomObject,
    pub cod: GeomObject,
    pub duration: f64,
    phi: ParamFn,
    path: PathFn,
}

impl fmt::Debug for GeomMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeomMorphism({} -> {}, T = {})", self.dom.name, self.cod.name, self.duration)
    }
}

impl GeomMorphism {
    /// A morphism from a parameter map and a path family. The path is only
    /// queried where the parameter map is defined.
    pub fn new(
        dom: GeomObject,
        cod: GeomObject,
        duration: f64,
        phi: impl Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync + 'static,
        path: impl Fn(&[f64], f64) -> Vec<Pose> + Send + Sync + 'static,
    ) -> GeomMorphism {
        GeomMorphism { dom, cod, duration, phi: Arc::new(phi), path: Arc::new(path) }
    }

    /// Paths interpolate each body from `theta_X(p)` to `theta_Y(Phi(p))`.
    pub fn straight(dom: GeomObject, cod: GeomObject, duration: f64, phi: impl Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync + 'static) -> GeomMorphism {
        let phi: ParamFn = Arc::new(phi);
        let (d, c, f) = (dom.clone(), cod.clone(), phi.clone());
        let path = move |p: &[f64], t: f64| {
            let a = d.poses(p);
            let b = match f(p) {
                Some(q) => c.poses(&q),
                None => return a,
            };
            let s = if duration > 0.0 { (t / duration).clamp(0.0, 1.0) } else { 1.0 };
            a.iter().zip(&b).map(|(x, y)| x.interpolate(y, s)).collect()
        };
        GeomMorphism { dom, cod, duration, phi, path: Arc::new(path) }
    }

    pub fn identity(x: &GeomObject, duration: f64) -> GeomMorphism {
        let o = x.clone();
        GeomMorphism::new(x.clone(), x.clone(), duration, |p| Some(p.to_vec()), move |p, _| o.poses(p))
    }

    /// `Phi(p)`, `None` where undefined or where `p` or its image falls
    /// outside the objects.
    pub fn apply(&self, p: &[f64]) -> Option<Vec<f64>> {
        self.apply_unchecked(p).filter(|q| self.cod.contains(q))
    }

    fn apply_unchecked(&self, p: &[f64]) -> Option<Vec<f64>> {
        if !self.dom.contains(p) {
            return None;
        }
        (self.phi)(p)
    }

    /// `phi(p, t)` for `t` in `[0, T]`; `None` where `Phi` is undefined.
    pub fn path_at(&self, p: &[f64], t: f64) -> Option<Vec<Pose>> {
        self.apply_unchecked(p)?;
        Some((self.path)(p, t.clamp(0.0, self.duration)))
    }

    /// The same morphism, defined only where `keep` holds.
    pub fn restrict(&self, keep: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> GeomMorphism {
        let f = self.phi.clone();
        GeomMorphism { phi: Arc::new(move |p| if keep(p) { f(p) } else { None }), ..self.clone() }
    }
}

fn same_bodies(a: &GeomObject, b: &GeomObject) -> bool {
    a.simples == b.simples && a.param_dim == b.param_dim
}

/// `f ; g`: run `f` then `g`, defined where both parameter maps are.
pub fn compose(f: &GeomMorphism, g: &GeomMorphism) -> Result<GeomMorphism, GeomError> {
    if !same_bodies(&f.cod, &g.dom) {
        return Err(GeomError::ObjectMismatch { left: f.cod.name.clone(), right: g.dom.name.clone() });
    }
    let (f1, g1) = (f.clone(), g.clone());
    let phi = move |p: &[f64]| {
        let q = f1.apply(p)?;
        g1.apply(&q)
    };
    let (f2, g2) = (f.clone(), g.clone());
    let tf = f.duration;
    let path = move |p: &[f64], t: f64| {
        if t <= tf {
            (f2.path)(p, t)
        } else {
            let q = (f2.phi)(p).expect("path queried outside the domain");
            (g2.path)(&q, t - tf)
        }
    };
    Ok(GeomMorphism { dom: f.dom.clone(), cod: g.cod.clone(), duration: f.duration + g.duration, phi: Arc::new(phi), path: Arc::new(path) })
}

/// Copy, discard, and equality-join on a value object, all instantaneous.
#[derive(Clone, Debug)]
pub struct ValueService {
    pub delta: GeomMorphism,
    pub eps: GeomMorphism,
    pub mu: GeomMorphism,
}

pub fn mk_value_service(v: &GeomObject) -> Result<ValueService, GeomError> {
    if !v.is_value() {
        return Err(GeomError::NotValue(v.name.clone()));
    }
    let vv = tensor_all(&[v.clone(), v.clone()]);
    let n = v.param_dim;
    let delta = GeomMorphism::new(v.clone(), vv.clone(), 0.0, |p| Some([p, p].concat()), |_, _| vec![]);
    let eps = GeomMorphism::new(v.clone(), GeomObject::unit(), 0.0, |_| Some(vec![]), |_, _| vec![]);
    let mu = GeomMorphism::new(vv, v.clone(), 0.0, move |p| points_close(&p[..n], &p[n..]).then(|| p[..n].to_vec()), |_, _| vec![]);
    Ok(ValueService { delta, eps, mu })
}

fn sample_points(x: &GeomObject, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).filter_map(|_| x.sample(&mut rng)).collect()
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{}", x)).collect();
    format!("({})", parts.join(", "))
}

fn max_gap(a: &[Pose], b: &[Pose]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| x.distance(y)).fold(0.0, f64::max)
}

/// Sampled check of the morphism conditions: endpoints match the structure
/// maps, the image lies in the codomain, and bodies stay disjoint every `dt`.
pub fn check_morphism(f: &GeomMorphism, x: &GeomObject, y: &GeomObject, samples: usize, dt: f64, seed: u64) -> Vec<Finding> {
    let mut out = Vec::new();
    if !same_bodies(&f.dom, x) || !same_bodies(&f.cod, y) {
        out.push(Finding::new(format!("boundary: morphism runs {} -> {}, checked against {} -> {}", f.dom.name, f.cod.name, x.name, y.name)));
        return out;
    }
    let pts = sample_points(x, samples, seed);
    let per_point = Exec::default().map(&pts, |p| {
        let mut fs = Vec::new();
        let Some(q) = f.apply_unchecked(p) else { return fs };
        let start = f.path_at(p, 0.0).unwrap();
        let gap = max_gap(&start, &x.poses(p));
        if gap > TOL {
            fs.push(Finding::new(format!("endpoint: phi(p, 0) differs from theta_X(p) by {:.3e} at p = {}", gap, fmt_point(p))));
        }
        if !y.contains(&q) {
            fs.push(Finding::new(format!("codomain: Phi(p) = {} is outside {} at p = {}", fmt_point(&q), y.name, fmt_point(p))));
        } else {
            let end = f.path_at(p, f.duration).unwrap();
            let gap = max_gap(&end, &y.poses(&q));
            if gap > TOL {
                fs.push(Finding::new(format!("endpoint: phi(p, T) differs from theta_Y(Phi(p)) by {:.3e} at p = {}", gap, fmt_point(p))));
            }
        }
        for t in time_grid(f.duration, dt) {
            let poses = f.path_at(p, t).unwrap();
            if let Some((i, j)) = overlap(&x.simples, &poses) {
                fs.push(Finding::new(format!("disjointness: bodies {} and {} meet at p = {}, t = {}", i, j, fmt_point(p), t)));
                break;
            }
        }
        fs
    });
    out.extend(per_point.into_iter().flatten());
    out
}

/// `0, dt, 2dt, ...` up to and including `t_end`.
pub fn time_grid(t_end: f64, dt: f64) -> Vec<f64> {
    let dt = if dt > 0.0 { dt } else { 0.01 };
    let n = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut v: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
    v.push(t_end);
    v
}

/// `f <= g`: equal durations, and wherever `f` is defined `g` is defined with
/// the same parameter image and path.
pub fn leq_morphism(f: &GeomMorphism, g: &GeomMorphism, samples: usize, seed: u64) -> Result<bool, GeomError> {
    if !same_bodies(&f.dom, &g.dom) || !same_bodies(&f.cod, &g.cod) {
        return Err(GeomError::ObjectMismatch { left: format!("{} -> {}", f.dom.name, f.cod.name), right: format!("{} -> {}", g.dom.name, g.cod.name) });
    }
    if f.duration != g.duration {
        return Ok(false);
    }
    let pts = sample_points(&f.dom, samples, seed);
    let ok = Exec::default().map(&pts, |p| {
        let Some(a) = f.apply(p) else { return true };
        let Some(b) = g.apply(p) else { return false };
        if !points_close(&a, &b) {
            return false;
        }
        time_grid(f.duration, f.duration / 8.0).iter().all(|&t| max_gap(&f.path_at(p, t).unwrap(), &g.path_at(p, t).unwrap()) <= TOL)
    });
    Ok(ok.into_iter().all(|b| b))
}
