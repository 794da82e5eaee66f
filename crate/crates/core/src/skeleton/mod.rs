//! Skeleta of Mumford curves: convex hulls of type-2 points, subdivision
//! into multiplicity-one points, the fundamental-domain skeleton and its
//! gluing, stable contraction, Galois orbits, fields of definition and the
//! resulting multiplicity bounds.

mod construct;
mod fields;
mod graph;
mod orbits;

pub use construct::{
    contract_into, contract_l_only, convex_hull_tree, fundamental_skeleton, glue, glue_mumford,
    stable_contraction, subdivide_mult1,
};
pub use fields::{
    annotate, defined_over, field_of_definition, multiplicity_over, quotient_multiplicity_bound,
    stabilization_bound, FieldOfDefinition, StabilizationBound,
};
pub use graph::{Annotations, Edge, Gluing, Segment, SkeletonGraph, Vertex};
pub use orbits::{galois_orbits, EdgeImage, ElementAction, OrbitReport, Witness};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkeletonError {
    #[error("no points given")]
    Empty,
    #[error("points belong to different towers")]
    TowerMismatch,
    #[error("gluing image for generator `{0}` is not a vertex")]
    GluingMismatch(String),
    #[error("{0} is not defined over any field of the lattice")]
    NotDefinedOverLattice(String),
    #[error("graph is not stable under the Galois action: {0}")]
    NotStable(String),
    #[error("reduction of {0} is inconclusive")]
    Inconclusive(String),
}
