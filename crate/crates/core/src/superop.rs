//! Helpers for linear maps on d×d matrices stored as d²×d² superoperators.

use num_complex::Complex64;

use crate::error::Result;
use crate::numkernel::{c64, exact_sqrt, gamma_involution, ComplexMat, RealMat};

/// Superoperator of `ρ ↦ Σ_{μν} q_{μν} tr(ρ A_ν) B_μ`.
pub(crate) fn from_frames(q: &RealMat, a: &[ComplexMat], b: &[ComplexMat]) -> ComplexMat {
    let d = a[0].rows();
    let n = d * d;
    let mut s = ComplexMat::zeros(n, n);
    for (mu, b_mu) in b.iter().enumerate() {
        for (nu, a_nu) in a.iter().enumerate() {
            let w = q[(mu, nu)];
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let bij = b_mu[(i, j)] * w;
                    if bij == c64(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..d {
                        for l in 0..d {
                            s[(i * d + j, k * d + l)] += bij * a_nu[(l, k)];
                        }
                    }
                }
            }
        }
    }
    s
}

pub(crate) fn dim_of(s: &ComplexMat) -> usize {
    exact_sqrt(s.rows()).expect("superoperator dimension must be a perfect square")
}

pub(crate) fn apply(s: &ComplexMat, rho: &ComplexMat) -> ComplexMat {
    let d = rho.rows();
    let out = s.mul_vec(rho.as_slice());
    ComplexMat::from_fn(d, d, |i, j| out[i * d + j])
}

/// Choi matrix `(E ⊗ id)(|ω⟩⟨ω|)` with normalized `|ω⟩`, i.e. `Γ(S)/d`.
pub(crate) fn choi(s: &ComplexMat) -> Result<ComplexMat> {
    let d = dim_of(s);
    Ok(gamma_involution(s)?.scale(c64(1.0 / d as f64, 0.0)))
}

/// Partial trace of a Choi matrix over the first (output) factor.
pub(crate) fn trace_out_output(choi: &ComplexMat, d: usize) -> ComplexMat {
    ComplexMat::from_fn(d, d, |b, e| {
        (0..d).fold(c64(0.0, 0.0), |acc, a| acc + choi[(a * d + b, a * d + e)])
    })
}

/// Superoperator of `ρ ↦ A ρ B`, which is `A ⊗ Bᵀ` under row-major vectorization.
pub(crate) fn sandwich(a: &ComplexMat, b: &ComplexMat) -> ComplexMat {
    a.kron(&b.transpose())
}

/// Max deviation of `tr E(|k⟩⟨l|)` from `δ_{kl}`.
pub(crate) fn trace_preservation_defect(s: &ComplexMat) -> f64 {
    let d = dim_of(s);
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let tr = (0..d).fold(c64(0.0, 0.0), |acc, i| acc + s[(i * d + i, k * d + l)]);
            let target = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((tr - target).norm());
        }
    }
    worst
}

/// Max deviation of `tr E(|k⟩⟨l|)` from zero.
pub(crate) fn trace_annihilation_defect(s: &ComplexMat) -> f64 {
    let d = dim_of(s);
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let tr = (0..d).fold(c64(0.0, 0.0), |acc, i| acc + s[(i * d + i, k * d + l)]);
            worst = worst.max(tr.norm());
        }
    }
    worst
}

/// `max |E(I) − I|`.
pub(crate) fn unitality_defect(s: &ComplexMat) -> f64 {
    let d = dim_of(s);
    let out = apply(s, &ComplexMat::identity(d));
    out.distance(&ComplexMat::identity(d))
}

/// Hermitian operator basis of d×d matrices: diagonal units plus the
/// symmetric and antisymmetric off-diagonal combinations.
pub(crate) fn hermitian_basis(d: usize) -> Vec<ComplexMat> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in i..d {
            if i == j {
                let mut m = ComplexMat::zeros(d, d);
                m[(i, i)] = c64(1.0, 0.0);
                out.push(m);
            } else {
                let mut x = ComplexMat::zeros(d, d);
                x[(i, j)] = c64(1.0, 0.0);
                x[(j, i)] = c64(1.0, 0.0);
                out.push(x);
                let mut y = ComplexMat::zeros(d, d);
                y[(i, j)] = c64(0.0, -1.0);
                y[(j, i)] = c64(0.0, 1.0);
                out.push(y);
            }
        }
    }
    out
}

/// Largest `‖E(X) − E(X)†‖_F` over a Hermitian basis.
pub(crate) fn hermiticity_preservation_defect(s: &ComplexMat) -> f64 {
    let d = dim_of(s);
    hermitian_basis(d)
        .iter()
        .map(|x| apply(s, x).hermiticity_defect())
        .fold(0.0, f64::max)
}

pub(crate) fn trace_inner(a: &ComplexMat, b: &ComplexMat) -> Complex64 {
    // tr(A B)
    let d = a.rows();
    let mut acc = c64(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
