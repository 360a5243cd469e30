//! Integral lattices with finite group actions, built around one question:
//! which intermediate lattices between the root and weight lattices of a
//! semisimple root system are quasi-permutation under the Weyl group.
//!
//! The crate decides this for products of simple factors of types A, B, C,
//! D and G2, and backs every verdict with a certificate that can be checked
//! independently: explicit permutation resolutions for positive answers and
//! nonzero Sha-two classes (or a documented reduction trace) for negative
//! ones.

pub mod classify;
pub mod cohomology;
pub mod constructions;
pub mod error;
pub mod glattice;
pub mod intmat;
pub mod json;
pub mod resolutions;
pub mod rootdata;

pub use error::{Error, Result};
pub use glattice::{
    EquivariantMap, FinGroup, GLattice, PermutationWitness, SignedPermutationWitness,
};
pub use intmat::{AbelianInvariants, HermiteForm, Int, IntMatrix, SmithForm};

/// Default cap on group closure.
pub const DEFAULT_MAX_GROUP_ORDER: usize = 20_000;
/// Default cap on the number of cells in a single cochain matrix.
pub const DEFAULT_MAX_CELLS: u128 = 50_000_000;
