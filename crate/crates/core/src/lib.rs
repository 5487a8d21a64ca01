//! Symmetric monoidal categories with attributes, as a planning kernel.
//!
//! Typed string diagrams over a signature of entity objects, data services
//! and attributes; spider normal forms and bounded proof search for `=` and
//! `<=`; a Boolean (PDDL) semantics; and a geometric semantics that replays
//! plans as collision-checked trajectories.

pub mod boolean;
pub mod diagram;
pub mod geom;
pub mod par;
pub mod pddl;
pub mod rewrite;
pub mod signature;
pub mod term;

pub use diagram::{build_diagram, Diagram};
pub use signature::{parse_signature, validate_signature, Signature};

/// A validation finding. Validators return lists of these; an empty list means valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub message: String,
    pub line: Option<usize>,
}

impl Finding {
    pub fn new(message: impl Into<String>) -> Self {
        Finding { message: message.into(), line: None }
    }

    pub fn at(message: impl Into<String>, line: usize) -> Self {
        Finding { message: message.into(), line: Some(line) }
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {}: {}", l, self.message),
            None => f.write_str(&self.message),
        }
    }
}
