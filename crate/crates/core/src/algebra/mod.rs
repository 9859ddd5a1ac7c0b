//! Finite Boolean algebras and clopen sets of finite-depth product spaces.

mod cylinder;
mod finite;

pub use cylinder::{
    cylinder_from_prefix, dset_to_cylinder, preimage_pi, ClopenAlgebra, CylinderSet, CylinderSpace, Prefix,
    DEFAULT_MAX_LEAVES,
};
pub use finite::{canonical_elements, generate_subalgebra, BooleanAlgebra, Element, FiniteAlgebra, Subalgebra, MAX_ATOMS};
