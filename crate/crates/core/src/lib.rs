//! Numerical laboratory for symmetric forms, majorization and matrix concavity.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: Hermitian eigendecomposition, compact SVD and spectral functions;
//! * [`forms`]: symmetric, positively homogeneous forms on spectra and their
//!   monotone/concave certification;
//! * [`majorization`]: (weak) majorization tests, bridge vectors and
//!   doubly stochastic certificates;
//! * [`variational`]: variational formulas for partial eigenvalue sums;
//! * [`lab`]: randomized concavity trials over matrix maps;
//! * [`io`]: JSON encodings shared by the command-line tool.

pub mod error;
pub mod forms;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod majorization;
pub mod rng;
pub mod variational;

pub use error::{Error, Result};
