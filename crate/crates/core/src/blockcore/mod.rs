//! Block arithmetic, Jacobi parameters, and the formal operator.

pub mod formal;
pub mod matrix;
pub mod params;
pub mod seq;

pub use formal::{apply_formal, cyclic_block_product};
pub use matrix::{
    embed_first_column, hs_norm, im_part, matrix_functionals, min_modulus, op_norm, re_part, Mat, MatrixFunctionals,
    Vector, C64,
};
pub use params::{
    make_family, validate_params, BlockRule, BlockTable, FamilySpec, Growth, JacobiParams, ScalarJacobi,
    ValidationReport, Violation, ViolationKind,
};
pub use seq::{delta, BlockMatSeq, BlockSeq, BlockVecSeq};
