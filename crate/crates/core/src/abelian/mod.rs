//! Finitely generated abelian groups, integer matrices and the Smith normal form.
//!
//! Every Picard/class group in the crate is an [`AbelianGroup`]; constructions
//! that produce new groups (cokernels, root pushouts, subgroups) go through
//! [`smith_normal_form`] and return groups in invariant-factor form.

mod group;
mod matrix;
mod snf;

pub use group::{
    cokernel, dual_group, pushout_root, quotient, subgroup, subgroup_cokernel, AbelianGroup,
    DiagonalizableGroupDescriptor, GroupElement, GroupHom, PushoutRoot, Quotient, SubgroupCokernel,
};
pub use matrix::IntMatrix;
pub use snf::{hermite_normal_form, integer_kernel, smith_normal_form, solve_integer, SmithForm};

pub(crate) use group::serialize_int;
