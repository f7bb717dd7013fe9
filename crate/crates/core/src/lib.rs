//! Character-variety mutation experiments for closed 3-manifold groups.

pub mod abelian;
pub mod groups;
pub mod words;
pub mod solver;
pub mod mutation;
pub mod fixtures;
pub mod report;
pub mod checks;
