//! Exact computations with Mumford curves over discretely valued fields:
//! number-field towers with a `p`-adic valuation, discs and Möbius maps on
//! the projective line, Schottky figures, skeleta with Galois actions, and
//! Mac Lane valuations.

pub mod examples;
pub mod linalg;
pub mod maclane;
pub mod pline;
pub mod poly;
pub mod scalar;
pub mod schottky;
pub mod skeleton;
pub mod valtower;

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;

pub type RatMatrix = linalg::Matrix<Rat>;
pub type RatPoly = poly::Poly<Rat>;
pub type FieldPoly = poly::Poly<valtower::FieldElement>;

pub use scalar::Val;
pub use valtower::{FieldElement, FieldTower};
