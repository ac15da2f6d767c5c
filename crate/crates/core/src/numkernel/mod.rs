//! Small dense linear algebra used throughout the crate.
//!
//! Everything here targets matrices of at most a few dozen rows, so the
//! algorithms favour robustness and simplicity over asymptotic speed.

mod eig;
mod expm;
mod matrix;
mod svd3;
mod vectorize;

pub use eig::{
    eigenvalues, hermitian_eig, match_real_spectra, match_spectra, real_eigenvalues, symmetric_eig,
    EigenResult,
};
pub use expm::mat_exp;
pub use matrix::{ComplexMat, Matrix, RealMat, Scalar};
pub use svd3::{is_rotation, svd3_rotations, SignedSvd};
pub use vectorize::{gamma_involution, unvec, vec};

pub(crate) use vectorize::exact_sqrt;

use num_complex::Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
