use super::matrix::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Row-major vectorization: `rho[(i, j)]` lands at index `i * d + j`.
pub fn vec<T: Scalar>(rho: &Matrix<T>) -> Result<Vec<T>> {
    rho.require_square()?;
    Ok(rho.as_slice().to_vec())
}

/// Inverse of [`vec`].
pub fn unvec<T: Scalar>(v: &[T]) -> Result<Matrix<T>> {
    let d = exact_sqrt(v.len()).ok_or(Error::NotPerfectSquare { dim: v.len() })?;
    Matrix::new(d, d, v.to_vec())
}

pub(crate) fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Index reshuffle `(L^Γ)_{ij,kl} = L_{ik,jl}` on a d²×d² matrix.
pub fn gamma_involution<T: Scalar>(l_hat: &Matrix<T>) -> Result<Matrix<T>> {
    let n = l_hat.require_square()?;
    let d = exact_sqrt(n).ok_or(Error::NotPerfectSquare { dim: n })?;
    Ok(Matrix::from_fn(n, n, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        l_hat[(i * d + k, j * d + l)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{ComplexMat, RealMat};
    use num_complex::Complex64;

    #[test]
    fn vec_is_row_major() {
        let m = RealMat::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(vec(&m).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            vec(&RealMat::identity(2)).unwrap(),
            vec![1.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(unvec(&vec(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn unvec_rejects_non_square_length() {
        assert!(matches!(
            unvec(&[1.0, 2.0, 3.0]),
            Err(Error::NotPerfectSquare { dim: 3 })
        ));
    }

    #[test]
    fn gamma_rejects_bad_dimension() {
        assert!(gamma_involution(&RealMat::identity(3)).is_err());
    }

    #[test]
    fn gamma_of_identity_superop() {
        // ones exactly where i = j and k = l
        let g = gamma_involution(&ComplexMat::identity(4)).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                let (i, j, k, l) = (row / 2, row % 2, col / 2, col % 2);
                let expect = if i == j && k == l { 1.0 } else { 0.0 };
                assert_eq!(g[(row, col)], Complex64::new(expect, 0.0));
            }
        }
    }
}
