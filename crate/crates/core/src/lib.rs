//! Exact numerical K-theory of Fano complete intersections.
//!
//! The crate builds Euler-pairing lattices spanned by twisting sheaves,
//! represents Serre functors, mutations, rotations and spherical twists as
//! integer matrices, and checks the resulting operator identities exactly.
//! Dimension formulas live in [`dimension_calculus`]; [`functor_words`] is a
//! small typed language for compositions of the functors involved.

pub mod ci_lattice;
pub mod dimension_calculus;
pub mod euler_ring;
pub mod functor_words;
pub mod lattice;
pub mod linalg;
pub mod presentation;
pub mod quadric_spinor;

/// Arbitrary-precision integer used for all lattice arithmetic.
pub type Int = num_bigint::BigInt;
/// Exact rational used for dimensions.
pub type Rational = num_rational::BigRational;
/// Integer matrix over [`Int`].
pub type IntMatrix = linalg::Matrix<Int>;
/// Saturated sublattice of `Int^n`.
pub type IntSublattice = linalg::Sublattice<Int>;

pub use ci_lattice::CompleteIntersection;
pub use euler_ring::{AmbientSpace, KClass};
pub use lattice::{LatticeOperator, NumLattice};
