use super::binding::Binding;
use super::morphism::{mk_value_service, time_grid, GeomMorphism, ValueService};
use super::object::{overlap, points_close, GeomObject};
use super::pose::Pose;
use super::GeomError;
use crate::diagram::{Diagram, Endpoint, NodeKind};
use crate::signature::Signature;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

/// Names, shapes and poses of the bodies in play.
type Scene = (Vec<String>, Vec<super::Shape>, Vec<Pose>);

/// One body pose at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct GeomSample {
    pub t: f64,
    pub object: String,
    pub pose: Pose,
}

/// A plan replayed in the geometric model.
#[derive(Clone, Debug, PartialEq)]
pub struct GeomTrace {
    /// Generator nodes in execution order, by tag (or name when untagged).
    pub steps: Vec<String>,
    /// Named parameter points before the first step and after each step.
    pub states: Vec<Vec<(String, Vec<f64>)>>,
    /// Parameters on the boundary outputs, in order.
    pub outputs: Vec<Vec<f64>>,
    pub samples: Vec<GeomSample>,
    pub duration: f64,
    /// First time each pair of bodies met during a step.
    pub collisions: Vec<(f64, String, String)>,
}

impl GeomTrace {
    /// CSV with header `t,object,qx,qy,qz,qw,x,y,z`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "object", "qx", "qy", "qz", "qw", "x", "y", "z"])?;
        for s in &self.samples {
            let q = s.pose.quat();
            let v = s.pose.translation;
            let mut rec = vec![format!("{:.6}", s.t), s.object.clone()];
            rec.extend(q.iter().chain([v.x, v.y, v.z].iter()).map(|x| format!("{:.9}", x + 0.0)));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Last named state.
    pub fn final_state(&self) -> BTreeMap<String, Vec<f64>> {
        self.states.last().map(|s| s.iter().cloned().collect()).unwrap_or_default()
    }
}

impl Binding {
    /// Initial parameters for the labeled boundary inputs of a plan diagram.
    pub fn inputs_for(&self, d: &Diagram) -> Result<Vec<Vec<f64>>, GeomError> {
        (0..d.inputs.len())
            .map(|i| {
                let w = d.wires.iter().find(|w| w.src == Endpoint::Boundary(i));
                let name = w.and_then(|w| w.label.clone()).ok_or_else(|| GeomError::Unbound(format!("input {} has no object name", i)))?;
                self.init.get(&name).cloned().ok_or_else(|| GeomError::Unbound(format!("initial parameter of {}", name)))
            })
            .collect()
    }
}

struct Eval<'a> {
    d: &'a Diagram,
    binding: &'a Binding,
    names: Vec<String>,
    named_only: bool,
    values: Vec<Option<Vec<f64>>>,
    live: BTreeSet<usize>,
    services: HashMap<String, ValueService>,
}

impl Eval<'_> {
    fn object(&self, w: usize) -> Result<&GeomObject, GeomError> {
        self.binding.object(&self.d.wires[w].ty)
    }

    fn service(&mut self, ty: &str) -> Result<ValueService, GeomError> {
        if !self.services.contains_key(ty) {
            let s = mk_value_service(self.binding.object(ty)?)?;
            self.services.insert(ty.to_string(), s);
        }
        Ok(self.services[ty].clone())
    }

    fn take(&mut self, w: usize) -> Vec<f64> {
        self.live.remove(&w);
        self.values[w].take().expect("wire evaluated before its source")
    }

    fn put(&mut self, w: usize, v: Vec<f64>) {
        self.live.insert(w);
        self.values[w] = Some(v);
    }

    fn state(&self) -> Vec<(String, Vec<f64>)> {
        self.live
            .iter()
            .filter(|&&w| !self.named_only || self.d.wires[w].label.is_some())
            .map(|&w| (self.names[w].clone(), self.values[w].clone().unwrap()))
            .collect()
    }

    /// Body names and poses for live wires, skipping `except`.
    fn scene(&self, except: &[usize]) -> Result<Scene, GeomError> {
        let (mut names, mut shapes, mut poses) = (vec![], vec![], vec![]);
        for &w in self.live.iter().filter(|w| !except.contains(w)) {
            let o = self.object(w)?;
            self.bodies(w, o, &o.poses(self.values[w].as_ref().unwrap()), &mut names, &mut shapes, &mut poses);
        }
        Ok((names, shapes, poses))
    }

    fn bodies(&self, w: usize, o: &GeomObject, ps: &[Pose], names: &mut Vec<String>, shapes: &mut Vec<super::Shape>, poses: &mut Vec<Pose>) {
        for (i, (s, p)) in o.simples.iter().zip(ps).enumerate() {
            names.push(if o.k() == 1 { self.names[w].clone() } else { format!("{}.{}", self.names[w], i) });
            shapes.push(s.clone());
            poses.push(*p);
        }
    }
}

fn wire_name(d: &Diagram, w: usize) -> String {
    d.wires[w].label.clone().unwrap_or_else(|| format!("{}#{}", d.wires[w].ty, w))
}

/// Replay a diagram in the geometric model. Nodes run in topological order;
/// each generator runs for its duration while every other live object holds
/// still, and data nodes act instantly as copies and equality guards.
/// `init` gives one parameter point per boundary input.
pub fn evaluate_plan(d: &Diagram, sig: &Signature, binding: &Binding, init: &[Vec<f64>], dt: f64) -> Result<GeomTrace, GeomError> {
    let order = d.topo_order().ok_or_else(|| GeomError::BindMismatch("diagram has a cycle".into()))?;
    let n = d.nodes.len();
    let mut ins: Vec<Vec<usize>> = d.nodes.iter().map(|x| vec![usize::MAX; x.inputs.len()]).collect();
    let mut outs: Vec<Vec<usize>> = d.nodes.iter().map(|x| vec![usize::MAX; x.outputs.len()]).collect();
    let mut bin = vec![usize::MAX; d.inputs.len()];
    let mut bout = vec![usize::MAX; d.outputs.len()];
    for (k, w) in d.wires.iter().enumerate() {
        match w.src {
            Endpoint::Boundary(i) => bin[i] = k,
            Endpoint::Port(a, j) => outs[a][j] = k,
        }
        match w.dst {
            Endpoint::Boundary(i) => bout[i] = k,
            Endpoint::Port(a, j) => ins[a][j] = k,
        }
    }
    if init.len() != d.inputs.len() {
        return Err(GeomError::BindMismatch(format!("{} initial points for {} inputs", init.len(), d.inputs.len())));
    }
    let mut ev = Eval {
        d,
        binding,
        names: (0..d.wires.len()).map(|w| wire_name(d, w)).collect(),
        named_only: d.wires.iter().any(|w| w.label.is_some()),
        values: vec![None; d.wires.len()],
        live: BTreeSet::new(),
        services: HashMap::new(),
    };
    for (i, p) in init.iter().enumerate() {
        if !binding.object(&d.inputs[i])?.contains(p) {
            return Err(GeomError::BadInit { input: i, ty: d.inputs[i].clone(), param: p.clone() });
        }
        ev.put(bin[i], p.clone());
    }
    let mut trace = GeomTrace { steps: vec![], states: vec![ev.state()], outputs: vec![], samples: vec![], duration: 0.0, collisions: vec![] };
    let mut morphisms: HashMap<String, GeomMorphism> = HashMap::new();
    let mut clock = 0.0;
    for (pos, &k) in order.iter().enumerate() {
        let node = &d.nodes[k];
        let before = || order[pos..].iter().find(|&&j| matches!(d.nodes[j].kind, NodeKind::Generator(_))).and_then(|&j| d.nodes[j].tag.clone());
        let args: Vec<Vec<f64>> = ins[k].iter().map(|&w| ev.values[w].clone().expect("wire evaluated before its source")).collect();
        let guard = |l: Vec<f64>, r: Vec<f64>| GeomError::GuardFailed { node: k, left: l, right: r, before: before() };
        let results: Vec<Vec<f64>> = match &node.kind {
            NodeKind::Gamma(a) => vec![args[0].clone(), binding.project(a, &args[0])?],
            NodeKind::Phi(a) => {
                let v = binding.project(a, &args[0])?;
                if !points_close(&v, &args[1]) {
                    return Err(guard(v, args[1].clone()));
                }
                vec![args[0].clone()]
            }
            NodeKind::Delta(ty) => split(ev.service(ty)?.delta.apply(&args[0]).unwrap(), 2),
            NodeKind::Eps(ty) => {
                ev.service(ty)?.eps.apply(&args[0]).unwrap();
                vec![]
            }
            NodeKind::Mu(ty) => match ev.service(ty)?.mu.apply(&args.concat()) {
                Some(v) => vec![v],
                None => return Err(guard(args[0].clone(), args[1].clone())),
            },
            NodeKind::Spider(_) => {
                if let Some(j) = (1..args.len()).find(|&j| !points_close(&args[0], &args[j])) {
                    return Err(guard(args[0].clone(), args[j].clone()));
                }
                let v = args.first().cloned().ok_or_else(|| GeomError::BindMismatch(format!("node {}: spider without a source", k)))?;
                vec![v; outs[k].len()]
            }
            NodeKind::Generator(g) => {
                if !morphisms.contains_key(g) {
                    morphisms.insert(g.clone(), binding.morphism(g, sig)?);
                }
                let f = &morphisms[g];
                let p = args.concat();
                let q = f.apply(&p).ok_or_else(|| GeomError::Undefined { node: k, what: g.clone(), param: p.clone() })?;
                if f.duration > 0.0 {
                    let (fixed_names, mut shapes, fixed_poses) = ev.scene(&ins[k])?;
                    let mut moving_names = Vec::new();
                    let mut tmp = Vec::new();
                    for &w in &ins[k] {
                        let o = ev.object(w)?;
                        let dummy = o.poses(ev.values[w].as_ref().unwrap());
                        ev.bodies(w, o, &dummy, &mut moving_names, &mut shapes, &mut tmp);
                    }
                    let names: Vec<String> = fixed_names.iter().chain(&moving_names).cloned().collect();
                    let mut met = BTreeSet::new();
                    let grid = time_grid(f.duration, dt);
                    for &t in &grid[..grid.len() - 1] {
                        let mut poses = fixed_poses.clone();
                        poses.extend(f.path_at(&p, t).unwrap());
                        if let Some((a, b)) = overlap(&shapes, &poses) {
                            if met.insert((a, b)) {
                                trace.collisions.push((clock + t, names[a].clone(), names[b].clone()));
                            }
                        }
                        for (name, pose) in names.iter().zip(&poses) {
                            trace.samples.push(GeomSample { t: clock + t, object: name.clone(), pose: *pose });
                        }
                    }
                }
                clock += f.duration;
                let dims: Vec<usize> = node.outputs.iter().map(|t| binding.object(t).map(|o| o.param_dim)).collect::<Result<_, _>>()?;
                let mut rest = q.as_slice();
                dims.iter()
                    .map(|&m| {
                        let (h, r) = rest.split_at(m);
                        rest = r;
                        h.to_vec()
                    })
                    .collect()
            }
        };
        for &w in &ins[k] {
            ev.take(w);
        }
        for (&w, v) in outs[k].iter().zip(results) {
            ev.put(w, v);
        }
        if let NodeKind::Generator(g) = &node.kind {
            trace.steps.push(node.tag.clone().unwrap_or_else(|| g.clone()));
            trace.states.push(ev.state());
        }
    }
    debug_assert!(n == order.len());
    let (names, _, poses) = ev.scene(&[])?;
    for (name, pose) in names.into_iter().zip(poses) {
        trace.samples.push(GeomSample { t: clock, object: name, pose });
    }
    trace.outputs = bout.iter().map(|&w| ev.values[w].clone().unwrap()).collect();
    trace.duration = clock;
    Ok(trace)
}

fn split(v: Vec<f64>, parts: usize) -> Vec<Vec<f64>> {
    let n = v.len() / parts;
    v.chunks(n.max(1)).take(parts).map(<[f64]>::to_vec).chain(std::iter::repeat(vec![])).take(parts).collect()
}
