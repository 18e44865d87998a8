//! Dense complex linear algebra: Hermitian eigendecomposition, compact SVD,
//! spectral matrix functions and the small dense helpers the rest of the crate uses.

mod eigen;
mod functions;
mod matrix;
mod solve;
mod svd;

pub use eigen::{eig_hermitian, sum_extremal_eigs, EigenDecomposition, Side, MAX_SWEEPS};
pub use functions::{
    admit_spectrum, apply_to_decomposition, fractional_power, matrix_exp, matrix_function,
    matrix_log, CustomFn, FnProps, Interval, ScalarFn, SPECTRAL_FLOOR,
};
pub use matrix::{hermitize, ComplexMatrix, HermitianMatrix, C64};
pub use solve::{complete_to_unitary, inverse, orthonormalize_columns};
pub use svd::{compact_svd, inverse_condition, CompactSvd, RANK_TOLERANCE};
