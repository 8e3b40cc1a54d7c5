//! Graded polynomial presentations of Cox rings.
//!
//! Polynomials carry exact rational coefficients; presentations are graded
//! by an [`AbelianGroup`](crate::abelian::AbelianGroup). Beyond homogeneity the
//! module offers the elimination of simple root relations `z^r − x`, a
//! polynomial-ring test built on it, a combinatorial singular-locus check for
//! single disjoint-support relations, and a sufficient test for the
//! degree-zero subalgebra being `k`.

mod poly;
pub(crate) mod presentation;
mod singular;
mod units;

pub use poly::{ExponentVector, PolyDisplay, Polynomial};
pub use presentation::{
    CoxPresentation, Homogeneity, HomogeneityReport, PolyHomogeneity, Variable,
};
pub use singular::{binomial_singular_locus, smoothness, SingularityReport, SingularityVerdict};
pub(crate) use units::nonnegative_circuit;
pub use units::{degree_zero_subalgebra_check, UnitCheck};
