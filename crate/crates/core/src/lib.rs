//! Cayley digraphs of dihedral groups: exact automorphism groups, normality,
//! and the CI property, all decided from first principles at desk scale.
//!
//! The layering is strict: `perm` knows nothing about dihedral groups,
//! `dihedral` nothing about digraphs. `cayley` ties them together and
//! `constructions` packages named graphs and the classification census.

pub mod arith;
pub mod cayley;
pub mod constructions;
pub mod dihedral;
pub mod perm;
