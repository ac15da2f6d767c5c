use super::matrix::{Matrix, Scalar};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 64;
const SCALED_NORM: f64 = 0.5;
// exp(700) is close to the largest finite double.
const MAX_NORM: f64 = 700.0;

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn mat_exp<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.require_square()?;
    let norm = m.norm_one();
    if !norm.is_finite() || norm > MAX_NORM * n.max(1) as f64 {
        return Err(Error::Overflow { norm });
    }
    let mut squarings = 0u32;
    if norm > SCALED_NORM {
        squarings = (norm / SCALED_NORM).log2().ceil() as u32;
    }
    let a = m.scale(T::from_f64(1.0 / 2f64.powi(squarings as i32)));

    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &a).scale(T::from_f64(1.0 / k as f64));
        sum = &sum + &term;
        if term.frobenius_norm() < 1e-16 * sum.frobenius_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(Error::Overflow { norm });
    }
    Ok(sum)
}
