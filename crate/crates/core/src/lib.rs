//! Moore-Penrose, unit-consistent and mixed generalized inverses, with the
//! robot kinematics experiments that distinguish them.
//!
//! The three inverses differ in which changes of variables they commute
//! with. The Moore-Penrose inverse is invariant under rotations, the
//! unit-consistent inverse under positive diagonal rescaling (changes of
//! units), and the mixed inverse under both, applied to separate blocks of
//! variables. The [`simulation`] module drives a planar arm and a rover
//! through resolved-rate control to show the practical consequences, and
//! [`verify`] bundles the reproduction and property suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod balance;
pub mod error;
pub mod inverse;
pub mod kinematics;
pub mod matrix;
pub mod pinv;
pub mod random;
pub mod scenario;
pub mod simulation;
pub mod text;
pub mod verify;

pub use balance::{scale_decompose, BalanceReport, BalanceSettings, ScaleDecomposition};
pub use error::{Error, Result};
pub use inverse::{
    check_rotation_consistency, check_unit_consistency, mixed_inverse, uc_inverse, BlockPartition,
    InverseKind, InverseOptions,
};
pub use matrix::{diag_from, kron, rotation_embed, Matrix};
pub use pinv::{pinv, svd, RankTolerance, SvdResult};
