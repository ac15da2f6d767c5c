use super::matrix::RealMat;
use crate::error::{Error, Result};

/// Signed singular value decomposition `m = s_hat · diag(lambda) · t_hat`
/// where both factors are proper rotations.
#[derive(Debug, Clone)]
pub struct SignedSvd {
    pub s_hat: RealMat,
    pub lambda: [f64; 3],
    pub t_hat: RealMat,
}

impl SignedSvd {
    pub fn reconstruct(&self) -> RealMat {
        &(&self.s_hat * &RealMat::diag(&self.lambda)) * &self.t_hat
    }
}

const MAX_SWEEPS: usize = 60;

/// Signed SVD of a 3×3 real matrix.
///
/// Runs one-sided (Hestenes) Jacobi, i.e. the Jacobi eigendecomposition of
/// `mᵀm` carried out implicitly on the columns of `m`, then sorts by
/// magnitude and pushes any reflection into the sign of the smallest value.
pub fn svd3_rotations(m: &RealMat) -> Result<SignedSvd> {
    m.require_shape(3, 3)?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut w = m.clone();
    let mut v = RealMat::identity(3);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
            for i in 0..3 {
                alpha += w[(i, p)] * w[(i, p)];
                beta += w[(i, q)] * w[(i, q)];
                gamma += w[(i, p)] * w[(i, q)];
            }
            if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            for mat in [&mut w, &mut v] {
                for i in 0..3 {
                    let a = mat[(i, p)];
                    let b = mat[(i, q)];
                    mat[(i, p)] = c * a - s * b;
                    mat[(i, q)] = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma = [0.0; 3];
    for (j, s) in sigma.iter_mut().enumerate() {
        *s = (0..3).map(|i| w[(i, j)] * w[(i, j)]).sum::<f64>().sqrt();
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

    let mut u_cols: [[f64; 3]; 3] = [[0.0; 3]; 3];
    let mut v_cols: [[f64; 3]; 3] = [[0.0; 3]; 3];
    let mut lambda = [0.0; 3];
    let cutoff = 1e-13 * sigma[order[0]].max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for (k, &j) in order.iter().enumerate() {
        lambda[k] = sigma[j];
        for i in 0..3 {
            v_cols[k][i] = v[(i, j)];
        }
        if sigma[j] > cutoff {
            for i in 0..3 {
                u_cols[k][i] = w[(i, j)] / sigma[j];
            }
            rank += 1;
        }
    }
    // Complete the left basis where singular values vanish.
    match rank {
        0 => {
            u_cols = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        }
        1 => {
            u_cols[1] = any_orthogonal(u_cols[0]);
            u_cols[2] = cross(u_cols[0], u_cols[1]);
        }
        2 => {
            u_cols[2] = cross(u_cols[0], u_cols[1]);
        }
        _ => {}
    }
    for k in rank..3 {
        lambda[k] = 0.0;
    }

    let mut s_hat = RealMat::from_fn(3, 3, |i, k| u_cols[k][i]);
    // t_hat = Vᵀ
    let mut t_hat = RealMat::from_fn(3, 3, |k, i| v_cols[k][i]);
    if s_hat.determinant() < 0.0 {
        for i in 0..3 {
            s_hat[(i, 2)] = -s_hat[(i, 2)];
        }
        lambda[2] = -lambda[2];
    }
    if t_hat.determinant() < 0.0 {
        for i in 0..3 {
            t_hat[(2, i)] = -t_hat[(2, i)];
        }
        lambda[2] = -lambda[2];
    }
    Ok(SignedSvd {
        s_hat,
        lambda,
        t_hat,
    })
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn any_orthogonal(a: [f64; 3]) -> [f64; 3] {
    // Cross with the coordinate axis least aligned with `a`.
    let k = (0..3)
        .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap();
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let c = cross(a, e);
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    [c[0] / n, c[1] / n, c[2] / n]
}

/// Whether `r` is orthogonal with determinant +1 to within `tol`.
pub fn is_rotation(r: &RealMat, tol: f64) -> bool {
    r.rows() == 3
        && r.cols() == 3
        && (&r.transpose() * r).distance(&RealMat::identity(3)) <= tol
        && (r.determinant() - 1.0).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &RealMat) -> SignedSvd {
        let svd = svd3_rotations(m).unwrap();
        assert!(is_rotation(&svd.s_hat, 1e-10), "{:?}", svd.s_hat);
        assert!(is_rotation(&svd.t_hat, 1e-10), "{:?}", svd.t_hat);
        assert!(svd.reconstruct().distance(m) < 1e-10, "{m:?} -> {svd:?}");
        let a = svd.lambda.map(f64::abs);
        assert!(a[0] >= a[1] && a[1] >= a[2]);
        svd
    }

    #[test]
    fn identity_is_trivial() {
        let svd = check(&RealMat::identity(3));
        assert_eq!(svd.lambda, [1.0, 1.0, 1.0]);
        assert!(svd.s_hat.distance(&RealMat::identity(3)) < 1e-15);
        assert!(svd.t_hat.distance(&RealMat::identity(3)) < 1e-15);
    }

    #[test]
    fn signed_diagonal() {
        let svd = check(&RealMat::diag(&[2.0, 1.0, -3.0]));
        let a = svd.lambda.map(f64::abs);
        assert!(
            (a[0] - 3.0).abs() < 1e-14 && (a[1] - 2.0).abs() < 1e-14 && (a[2] - 1.0).abs() < 1e-14
        );
    }

    #[test]
    fn minus_identity_keeps_odd_sign() {
        let svd = check(&RealMat::diag(&[-1.0, -1.0, -1.0]));
        let negatives = svd.lambda.iter().filter(|&&x| x < 0.0).count();
        assert_eq!(negatives % 2, 1);
        // det(Λ) = λ1λ2λ3 when both factors are rotations
        let prod: f64 = svd.lambda.iter().product();
        assert!((prod + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_inputs() {
        check(&RealMat::zeros(3, 3));
        check(&RealMat::from_rows(&[
            [1.0, 2.0, 3.0],
            [2.0, 4.0, 6.0],
            [-1.0, -2.0, -3.0],
        ]));
        check(&RealMat::from_rows(&[
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, 1.0, 2.0],
        ]));
        check(&RealMat::diag(&[1e-7, 1e-7, 2.0]));
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(svd3_rotations(&RealMat::identity(2)).is_err());
    }
}
