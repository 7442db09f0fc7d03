//! Perturbation semigroups of matrix *-algebras.
//!
//! For a block-diagonal *-algebra over R, C, H the perturbation semigroup
//! consists of the normalized self-adjoint elements of the tensor square
//! with the opposite algebra. This crate constructs such elements, realizes
//! them as structured complex matrices, multiplies and canonicalizes them,
//! decomposes them along direct sums, embeds unitary groups, applies them
//! as fluctuations to hermitian operators, and cross-checks every structure
//! statement with an independent linear-algebra oracle.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod canonical;
pub mod error;
pub mod fluctuation;
pub mod matalg;
pub mod oracle;
pub mod pert;
pub mod unitary;
mod wire;

pub use algebra::{AlgebraDescriptor, Block};
pub use canonical::{
    build_basis, canonicalize, decomposition_report, dimension_table, is_invertible,
    sample_member, semidirect_multiply, CanonicalBasis, CanonicalBlocks, CanonicalForm,
    DecompositionReport, DimensionTable,
};
pub use error::{PertError, Result};
pub use fluctuation::{action_composition_check, fluctuate, fluctuate_unchecked, DiracOperator};
pub use matalg::{
    embed_quaternion, hermitian_eigenvalues, ComplexScalar, FieldTag, Matrix, Quaternion,
};
pub use oracle::{affine_dimension, charpoly_eigenvalues, residual, ConstraintSystem};
pub use pert::{
    merge_direct_sum, pert_cn_coordinates, pert_cn_from_coordinates, split_direct_sum,
    structure_data, CrossPart, PertMatrix, StructureData, TensorElement, MEMBER_TOL,
};
pub use unitary::{
    embed_unitary, random_unitary, verify_rep_decomposition, RepReport, UnitaryElement,
};
