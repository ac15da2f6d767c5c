//! Four-state stochastic matrices.
//!
//! Convention: matrices are **column stochastic**, `⟨e_0|Q = ⟨e_0|`. In the
//! orthonormal basis `|e_μ⟩` such a matrix reads
//!
//! ```text
//! Q = |e_0⟩⟨e_0| + Σ t_i |e_i⟩⟨e_0| + Σ Λ_ij |e_i⟩⟨e_j|
//! ```
//!
//! and acts on tetrahedron coordinates as the affine map `r ↦ Λr + t`.
//! Doubly stochastic matrices have `t = 0` and factor as `Q = S·Q_n·T` with
//! `Q_n = |e_0⟩⟨e_0| + Σ λ_i |e_i⟩⟨e_i|` and `S`, `T` embedded rotations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numkernel::{real_eigenvalues, svd3_rotations, RealMat};
use crate::tetra::{self, in_tetrahedron, BlochVec, ProbVec4};

/// Tolerance on column and row sums.
pub const SUM_TOL: f64 = 1e-10;
/// Largest `|t|` accepted as doubly stochastic by [`normal_form`].
pub const TRANSLATION_TOL: f64 = 1e-9;
const MAX_SAMPLER_ATTEMPTS: usize = 100_000;

/// Classification of a square real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticFlags {
    pub is_stochastic: bool,
    pub is_doubly_stochastic: bool,
    pub is_symmetric: bool,
    pub min_entry: f64,
    /// Location `(row, col)` of the smallest entry.
    pub min_entry_at: (usize, usize),
    pub max_column_deviation: f64,
    pub max_row_deviation: f64,
    pub max_asymmetry: f64,
    pub tol: f64,
}

/// Classifies any square matrix; the stochastic conventions are the same
/// for every dimension.
pub fn classify(q: &RealMat, tol: f64) -> Result<StochasticFlags> {
    let n = q.require_square()?;
    let mut min_entry = f64::INFINITY;
    let mut min_entry_at = (0, 0);
    let mut max_asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if q[(i, j)] < min_entry {
                min_entry = q[(i, j)];
                min_entry_at = (i, j);
            }
            max_asymmetry = max_asymmetry.max((q[(i, j)] - q[(j, i)]).abs());
        }
    }
    let max_column_deviation = (0..n)
        .map(|j| ((0..n).map(|i| q[(i, j)]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let max_row_deviation = (0..n)
        .map(|i| (q.row(i).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let is_stochastic = min_entry >= -tol && max_column_deviation <= SUM_TOL;
    Ok(StochasticFlags {
        is_stochastic,
        is_doubly_stochastic: is_stochastic && max_row_deviation <= SUM_TOL,
        is_symmetric: max_asymmetry <= SUM_TOL,
        min_entry,
        min_entry_at,
        max_column_deviation,
        max_row_deviation,
        max_asymmetry,
        tol,
    })
}

/// A 4×4 real matrix together with its stochasticity classification.
#[derive(Debug, Clone, PartialEq)]
pub struct StochMat4 {
    q: RealMat,
    pub flags: StochasticFlags,
}

impl StochMat4 {
    pub fn q(&self) -> &RealMat {
        &self.q
    }

    pub fn is_stochastic(&self) -> bool {
        self.flags.is_stochastic
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.flags.is_doubly_stochastic
    }

    pub fn is_symmetric(&self) -> bool {
        self.flags.is_symmetric
    }
}

/// Classifies a 4×4 matrix. Only the shape is enforced; stochasticity is
/// reported, not required.
pub fn validate(q: &RealMat, tol: f64) -> Result<StochMat4> {
    q.require_shape(4, 4)?;
    if !q.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(StochMat4 {
        flags: classify(q, tol)?,
        q: q.clone(),
    })
}

/// `(t, Λ)` expansion of a column-stochastic matrix in the `|e_μ⟩` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub t: [f64; 3],
    pub lambda_mat: RealMat,
}

impl AffineForm {
    /// `Λ r + t`.
    pub fn apply(&self, r: &BlochVec) -> BlochVec {
        let lr = self.lambda_mat.mul_vec(&r.r);
        BlochVec::new([lr[0] + self.t[0], lr[1] + self.t[1], lr[2] + self.t[2]])
    }

    /// Rebuilds `Q` in the configuration basis.
    pub fn to_matrix(&self) -> RealMat {
        let block = RealMat::from_fn(4, 4, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (_, 0) => self.t[i - 1],
            _ => self.lambda_mat[(i - 1, j - 1)],
        });
        from_e_basis(&block)
    }
}

/// `E · m · Eᵀ`: a matrix given in the `|e_μ⟩` basis, in configuration coordinates.
pub fn from_e_basis(m: &RealMat) -> RealMat {
    let e = tetra::basis_matrix();
    &(&e * m) * &e.transpose()
}

/// `Eᵀ · q · E`: matrix elements `⟨e_μ|q|e_ν⟩`.
pub fn to_e_basis(q: &RealMat) -> RealMat {
    let e = tetra::basis_matrix();
    &(&e.transpose() * q) * &e
}

pub fn to_affine(q: &StochMat4) -> Result<AffineForm> {
    if q.flags.max_column_deviation > SUM_TOL {
        return Err(Error::NotColumnStochastic {
            deviation: q.flags.max_column_deviation,
            min_entry: q.flags.min_entry,
        });
    }
    let m = to_e_basis(&q.q);
    Ok(AffineForm {
        t: [m[(1, 0)], m[(2, 0)], m[(3, 0)]],
        lambda_mat: RealMat::from_fn(3, 3, |i, j| m[(i + 1, j + 1)]),
    })
}

/// Block embedding `diag(1, R)` of a 3×3 matrix, expressed in the
/// configuration basis.
pub fn embed(r: &RealMat) -> RealMat {
    let block = RealMat::from_fn(4, 4, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => r[(i - 1, j - 1)],
    });
    from_e_basis(&block)
}

/// Normal form `Q_n = |e_0⟩⟨e_0| + Σ λ_i |e_i⟩⟨e_i|` in configuration
/// coordinates. Entry `(μ, ν)` equals `(1 + Σ_i λ_i (e_μ)_i (e_ν)_i)/4`.
pub fn q_normal(lambda: &[f64; 3]) -> RealMat {
    from_e_basis(&RealMat::diag(&[1.0, lambda[0], lambda[1], lambda[2]]))
}

/// Rotation normal form of a doubly stochastic matrix.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub s_hat: RealMat,
    /// Signed singular values, sorted by decreasing magnitude.
    pub lambda: [f64; 3],
    pub t_hat: RealMat,
}

impl NormalForm {
    pub fn s(&self) -> RealMat {
        embed(&self.s_hat)
    }

    pub fn t(&self) -> RealMat {
        embed(&self.t_hat)
    }

    pub fn q_n(&self) -> RealMat {
        q_normal(&self.lambda)
    }

    /// `S · Q_n · T`.
    pub fn reconstruct(&self) -> RealMat {
        &(&self.s() * &self.q_n()) * &self.t()
    }
}

/// Factors a doubly stochastic `Q` as `S·Q_n·T`.
///
/// Requires unit column sums and `t = 0`; entry signs are not checked, so
/// products `S·Q_n·T` that left the stochastic set still factor.
pub fn normal_form(q: &StochMat4) -> Result<NormalForm> {
    let affine = to_affine(q)?;
    let translation = tetra::dot3(&affine.t, &affine.t).sqrt();
    if translation > TRANSLATION_TOL {
        return Err(Error::NotDoublyStochastic { translation });
    }
    let svd = svd3_rotations(&affine.lambda_mat)?;
    Ok(NormalForm {
        s_hat: svd.s_hat,
        lambda: svd.lambda,
        t_hat: svd.t_hat,
    })
}

/// Decides whether `Q_n(λ)` is doubly stochastic, by membership of `λ` in Δ
/// and by the sign of every entry of `Q_n(λ)`. The two tests are the same
/// statement; disagreement is reported as an error.
///
/// The geometric test uses `tol` on face margins; since entries of `Q_n` are
/// margins divided by four, the entrywise test uses `tol / 4`.
pub fn normal_is_stochastic(lambda: &[f64; 3], tol: f64) -> Result<bool> {
    if lambda.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let geometric = in_tetrahedron(&BlochVec::new(*lambda), tol).inside;
    let qn = q_normal(lambda);
    let min_entry = qn.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let entrywise = min_entry >= -tol / 4.0;
    if geometric != entrywise {
        let margin = 4.0 * min_entry;
        if (margin + tol).abs() > 1e-9 {
            return Err(Error::InconsistentCertificate(format!(
                "λ = {lambda:?}: tetrahedron test says {geometric}, entry test says {entrywise} (min entry {min_entry:e})"
            )));
        }
    }
    Ok(geometric)
}

/// Eigenvalues of a square real matrix.
pub fn spectrum(q: &RealMat) -> Result<Vec<Complex64>> {
    real_eigenvalues(q)
}

/// Markov-chain trajectory `p, Qp, Q²p, …, Qⁿp` (length `n + 1`).
pub fn step(q: &StochMat4, p: &ProbVec4, n: usize) -> Result<Vec<ProbVec4>> {
    if !q.is_stochastic() {
        return Err(Error::NotColumnStochastic {
            deviation: q.flags.max_column_deviation,
            min_entry: q.flags.min_entry,
        });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(*p);
    let mut cur = *p;
    for _ in 0..n {
        let next = q.q.mul_vec(&cur.as_array());
        cur = ProbVec4::new([next[0], next[1], next[2], next[3]])?;
        out.push(cur);
    }
    Ok(out)
}

/// Rotation matrix of a unit quaternion `(w, x, y, z)`.
pub fn rotation_from_quaternion(w: f64, x: f64, y: f64, z: f64) -> RealMat {
    RealMat::from_rows(&[
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ])
}

/// Haar-random rotation (uniform unit quaternion, Shoemake's method).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RealMat {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let u3: f64 = rng.gen();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    rotation_from_quaternion(
        b * (2.0 * PI * u3).cos(),
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
    )
}

/// Random doubly stochastic matrix `S·Q_n(λ)·Sᵀ` with `λ` uniform in Δ and a
/// Haar-random rotation, resampled until every entry is nonnegative.
pub fn random_doubly_stochastic<R: Rng + ?Sized>(rng: &mut R) -> Result<StochMat4> {
    for _ in 0..MAX_SAMPLER_ATTEMPTS {
        let lambda = tetra::sample_tetrahedron(rng).r;
        let s = embed(&random_rotation(rng));
        let q = &(&s * &q_normal(&lambda)) * &s.transpose();
        let m = validate(&q, 0.0)?;
        if m.is_doubly_stochastic() {
            return Ok(m);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_SAMPLER_ATTEMPTS,
    })
}

/// Random column-stochastic matrix with each column uniform on the simplex.
pub fn random_column_stochastic<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> RealMat {
    let mut q = RealMat::zeros(dim, dim);
    for j in 0..dim {
        let w: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = w.iter().sum();
        for i in 0..dim {
            q[(i, j)] = w[i] / total;
        }
    }
    q
}
