//! Exact Cox-data calculus for Mori dream quotient stacks.
//!
//! A stack `[Spec R \ V(J) / Hom(A, k^*)]` is described by its grading group
//! `A`, a graded presentation of `R` and generators of `J`. The crate provides
//! the root constructions (along divisors and along line bundles),
//! rigidification into a gerbe-free stack plus root data, the toric
//! stacky-fan correspondence, toric-ness detection and the ambient toric
//! embedding, together with a line-oriented file format and a CLI.

pub mod abelian;
pub mod error;
pub mod gradedring;
pub mod io;
pub mod stack;
pub mod toric;

pub use error::{Error, Result};
