//! Reference oracles for tests. Nothing here reuses the engine's own
//! reasoning: diagrams are evaluated pointwise, Boolean questions by truth
//! table, and geometry by closed-form distances.

pub mod boolean;
pub mod finite;
pub mod geometry;
pub mod random;
