//! Geometric semantics: objects are parameterized rigid bodies, morphisms
//! are timed partial paths, and a plan replays as a collision-checked
//! trajectory.

mod binding;
mod eval;
mod morphism;
mod object;
mod pose;
mod shape;

pub use binding::{parse_binding, Binding, GenBinding, ObjBinding};
pub use eval::{evaluate_plan, GeomSample, GeomTrace};
pub use morphism::{check_morphism, compose, leq_morphism, mk_value_service, time_grid, GeomMorphism, ValueService};
pub use object::{instantiate_object, tensor_all, tensor_objects, Family, GeomObject, Space, TOL};
pub use pose::Pose;
pub use shape::{disjoint, Shape};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("unknown object model '{0}'")]
    UnknownModel(String),
    #[error("unknown morphism family '{0}'")]
    UnknownFamily(String),
    #[error("model '{model}': {msg}")]
    BadConstants { model: String, msg: String },
    #[error("model '{model}': bodies {i} and {j} overlap at parameter {param:?}")]
    SelfOverlap { model: String, param: Vec<f64>, i: usize, j: usize },
    #[error("object mismatch: {left} vs {right}")]
    ObjectMismatch { left: String, right: String },
    #[error("no geometric binding for {0}")]
    Unbound(String),
    #[error("node {node}: guard failed, {left:?} differs from {right:?}{}", before.as_ref().map(|t| format!(" (before step {})", t)).unwrap_or_default())]
    GuardFailed { node: usize, left: Vec<f64>, right: Vec<f64>, before: Option<String> },
    #[error("node {node}: {what} is undefined at {param:?}")]
    Undefined { node: usize, what: String, param: Vec<f64> },
    #[error("binding line {line}: {msg}")]
    BindingSyntax { line: usize, msg: String },
    #[error("{0}")]
    BindMismatch(String),
    #[error("'{0}' is not a value object")]
    NotValue(String),
    #[error("initial parameter for input {input} ({ty}) is outside the object: {param:?}")]
    BadInit { input: usize, ty: String, param: Vec<f64> },
    #[error("collision: bodies {a} and {b} meet at t = {t}")]
    Collision { a: String, b: String, t: f64 },
    #[error(transparent)]
    Diagram(#[from] crate::diagram::DiagramError),
}
