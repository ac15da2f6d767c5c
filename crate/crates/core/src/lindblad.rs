//! Symmetric classical generators and their quantum images.
//!
//! A symmetric rate matrix `H` with zero column sums has block form
//! `H = Σ H_ij |e_i⟩⟨e_j|` and normal form `H = S'·H_n·S'ᵀ` with
//! `H_n = Σ h_i |e_i⟩⟨e_i|`. In configuration coordinates
//!
//! ```text
//! (H_n)_{μν} = Σ_i h_i (e_μ)_i (e_ν)_i / 4
//! ```
//!
//! so off-diagonal entries are `h·e_k / 4` (k = 1, 2, 3) and diagonal entries
//! are `h·e_0 / 4`. The quantum image `L = E_H` is a Lindblad generator iff it
//! preserves Hermiticity, its dual annihilates the identity, and
//! `ω⊥ L̂^Γ ω⊥ ≥ 0`.

use crate::error::{Error, Result};
use crate::numkernel::{
    c64, gamma_involution, hermitian_eig, mat_exp, symmetric_eig, ComplexMat, RealMat,
};
use crate::qchannel::{self, QubitChannel};
use crate::stochastic::{self, embed, from_e_basis};
use crate::superop;
use crate::tetra::{dot3, VERTICES};
use crate::EIGEN_FLOOR;

/// Tolerance for symmetry and zero column sums.
pub const GENERATOR_TOL: f64 = 1e-10;
/// Tolerance on the Hermiticity-preservation and dual-unitality checks.
pub const CERT_TOL: f64 = 1e-10;
/// Agreement required between `E_{exp(tH)}` and `exp(t E_H)`.
pub const EXP_TOL: f64 = 1e-8;

/// A symmetric 4×4 generator with zero column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator4 {
    h: RealMat,
    /// Every off-diagonal rate is nonnegative (within the construction tolerance).
    pub is_classical_generator: bool,
    pub min_off_diagonal: f64,
}

impl Generator4 {
    /// Validates symmetry and `⟨e_0|H = 0`; `tol` applies to the
    /// off-diagonal sign test.
    pub fn new(h: RealMat, tol: f64) -> Result<Self> {
        h.require_shape(4, 4)?;
        if !h.is_finite() {
            return Err(Error::NonFinite);
        }
        let flags = stochastic::classify(&h, tol)?;
        if flags.max_asymmetry > GENERATOR_TOL {
            return Err(Error::NotSymmetric {
                asymmetry: flags.max_asymmetry,
            });
        }
        let deviation = (0..4)
            .map(|j| (0..4).map(|i| h[(i, j)]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if deviation > GENERATOR_TOL {
            return Err(Error::ColumnSumNotZero { deviation });
        }
        let mut min_off_diagonal = f64::INFINITY;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    min_off_diagonal = min_off_diagonal.min(h[(i, j)]);
                }
            }
        }
        Ok(Self {
            h,
            is_classical_generator: min_off_diagonal >= -tol,
            min_off_diagonal,
        })
    }

    /// Builds `S'·H_n(h)·S'ᵀ` directly.
    pub fn from_normal(h_vec: &[f64; 3], s_prime_hat: &RealMat, tol: f64) -> Result<Self> {
        let s = embed(s_prime_hat);
        let h = &(&s * &h_normal(h_vec)) * &s.transpose();
        // symmetrize away rounding
        let h = RealMat::from_fn(4, 4, |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));
        Self::new(h, tol)
    }

    pub fn h(&self) -> &RealMat {
        &self.h
    }
}

/// `H_n = Σ h_i |e_i⟩⟨e_i|` in configuration coordinates.
pub fn h_normal(h_vec: &[f64; 3]) -> RealMat {
    from_e_basis(&RealMat::diag(&[0.0, h_vec[0], h_vec[1], h_vec[2]]))
}

/// `H = S'·H_n·S'ᵀ`.
#[derive(Debug, Clone)]
pub struct GenNormalForm {
    pub s_prime_hat: RealMat,
    /// Descending.
    pub h_vec: [f64; 3],
}

impl GenNormalForm {
    pub fn h_n(&self) -> RealMat {
        h_normal(&self.h_vec)
    }

    pub fn reconstruct(&self) -> RealMat {
        let s = embed(&self.s_prime_hat);
        &(&s * &self.h_n()) * &s.transpose()
    }
}

/// Symmetric eigendecomposition of the 3×3 block `⟨e_i|H|e_j⟩`, with the
/// eigenvector matrix made a proper rotation.
pub fn gen_normal_form(h: &Generator4) -> Result<GenNormalForm> {
    let m = stochastic::to_e_basis(&h.h);
    let block = RealMat::from_fn(3, 3, |i, j| 0.5 * (m[(i + 1, j + 1)] + m[(j + 1, i + 1)]));
    let (values, mut vectors) = symmetric_eig(&block)?;
    if vectors.determinant() < 0.0 {
        for i in 0..3 {
            vectors[(i, 2)] = -vectors[(i, 2)];
        }
    }
    Ok(GenNormalForm {
        s_prime_hat: vectors,
        h_vec: [values[0], values[1], values[2]],
    })
}

/// True iff `h·e_k ≥ −tol` for k = 1, 2, 3, i.e. every off-diagonal rate of
/// `H_n(h)` is nonnegative. The diagonal `h·e_0/4` is then ≤ 0 because
/// `Σ_μ h·e_μ = 0`.
pub fn is_classical_generator(h_vec: &[f64; 3], tol: f64) -> bool {
    VERTICES[1..].iter().all(|e| dot3(h_vec, e) >= -tol)
}

/// Superoperator of `E_H` (the same linear construction as for channels).
pub fn map_generator(h: &Generator4) -> Result<ComplexMat> {
    qchannel::superoperator(&h.h)
}

/// `I − |ω⟩⟨ω|` with `|ω⟩ = (|00⟩ + |11⟩)/√2`.
pub fn omega_perp() -> ComplexMat {
    let mut m = ComplexMat::identity(4);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, c)] -= c64(0.5, 0.0);
    }
    m
}

/// Evidence for (or against) a map being a Lindblad generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladCertificate {
    /// Eigenvalues of `ω⊥ L̂^Γ ω⊥`, descending.
    pub omega_perp_spectrum: Vec<f64>,
    pub hermitian_ok: bool,
    pub dual_unital_ok: bool,
    pub conditional_positivity_ok: bool,
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
}

impl LindbladCertificate {
    pub fn certified(&self) -> bool {
        self.hermitian_ok && self.dual_unital_ok && self.conditional_positivity_ok
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.omega_perp_spectrum
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Checks the three Lindblad conditions on a 4×4 superoperator.
///
/// `L*(I) = 0` for the dual map is the same as `tr L(ρ) = 0` for every `ρ`,
/// which is what gets measured.
pub fn lindblad_certify(l_superop: &ComplexMat) -> Result<LindbladCertificate> {
    l_superop.require_shape(4, 4)?;
    let hermiticity_defect = superop::hermiticity_preservation_defect(l_superop);
    let trace_defect = superop::trace_annihilation_defect(l_superop);
    let wp = omega_perp();
    let reshuffled = gamma_involution(l_superop)?;
    let projected = &(&wp * &reshuffled) * &wp;
    let eig = hermitian_eig(&projected)?;
    let conditional_positivity_ok = eig.min_eigenvalue() >= -EIGEN_FLOOR;
    Ok(LindbladCertificate {
        omega_perp_spectrum: eig.eigenvalues,
        hermitian_ok: hermiticity_defect <= CERT_TOL,
        dual_unital_ok: trace_defect <= CERT_TOL,
        conditional_positivity_ok,
        hermiticity_defect,
        trace_defect,
    })
}

/// One time sample of the comparison between `E_{exp(tH)}` and `exp(t E_H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSample {
    pub time: f64,
    /// `‖superop(E_{exp(tH)}) − exp(t·L)‖_F`.
    pub residual: f64,
    pub classical_stochastic: bool,
    pub quantum_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub min_classical_entry: f64,
}

impl ExpSample {
    pub fn ok(&self) -> bool {
        self.residual <= EXP_TOL && self.classical_stochastic && self.quantum_cp
    }
}

/// Computes every [`ExpSample`] without judging them.
pub fn exp_report(h: &Generator4, times: &[f64]) -> Result<Vec<ExpSample>> {
    let l = map_generator(h)?;
    times
        .iter()
        .map(|&t| {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::ConsistencyViolation {
                    time: t,
                    reason: "time must be finite and nonnegative".into(),
                });
            }
            let q_t = mat_exp(&h.h.scale(t))?;
            let classical = stochastic::classify(&q_t, crate::DEFAULT_TOL)?;
            let lifted = qchannel::superoperator(&q_t)?;
            let l_t = mat_exp(&l.scale(c64(t, 0.0)))?;
            let quantum = QubitChannel::from_superop(l_t.clone())?;
            Ok(ExpSample {
                time: t,
                residual: lifted.distance(&l_t),
                classical_stochastic: classical.is_stochastic,
                quantum_cp: quantum.completely_positive,
                min_choi_eigenvalue: quantum.min_choi_eigenvalue(),
                min_classical_entry: classical.min_entry,
            })
        })
        .collect()
}

/// Verifies `E_{exp(tH)} = exp(t E_H)`, stochasticity of `exp(tH)` and
/// complete positivity of `exp(t E_H)` at every requested time.
pub fn exp_consistency(h: &Generator4, times: &[f64]) -> Result<Vec<ExpSample>> {
    let samples = exp_report(h, times)?;
    if let Some(bad) = samples.iter().find(|s| !s.ok()) {
        let reason = if bad.residual > EXP_TOL {
            format!("residual {:e}", bad.residual)
        } else if !bad.classical_stochastic {
            format!(
                "exp(tH) not stochastic (min entry {:e})",
                bad.min_classical_entry
            )
        } else {
            format!(
                "exp(tL) not CP (min Choi eigenvalue {:e})",
                bad.min_choi_eigenvalue
            )
        };
        return Err(Error::ConsistencyViolation {
            time: bad.time,
            reason,
        });
    }
    Ok(samples)
}
