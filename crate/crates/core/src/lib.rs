//! Deformed free fields on truncated Fock spaces over momentum grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chiral;
pub mod deform;
pub mod dense;
pub mod error;
pub mod fock;
pub mod grid;
pub mod inner_function;
pub mod table;

pub use num_complex::Complex64;

pub use chiral::{
    compare_operators, kernel_r0_plus, twist_boost_deviation, BiFockVector, BiFockVectorJson, ChiralGridPair,
    ChiralSpace, IdentityReport, Side,
};
pub use deform::{
    apply_y, apply_y_table, kernel, kernel_argument, kernel_boost_deviation, kernel_symmetry_check,
    sign_root_table, wedge_invariant, DeformedFields, KernelSpec, SharpTwistVariant,
};
pub use dense::{matrix_in_basis, max_abs_deviation, operator_matrix, SymmetricBasis};
pub use error::{Error, Result};
pub use fock::{symmetrize, Boosted, FockSpace, FockVector, FockVectorJson, OneParticleVector, TestFunctionData};
pub use grid::{boost_momentum, omega, Layout, MomentumGrid};
pub use inner_function::{
    check_symmetric_inner, eval_inner, eval_root, make_root, root_ratio, scattering_from_inner, BlaschkeSpec,
    Branch, FlipSet, InnerReport, Root, RootRatioReport,
};
pub use table::PairTable;
