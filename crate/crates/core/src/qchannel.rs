//! The map from 4×4 matrices to qubit channels,
//!
//! ```text
//! E_Q(ρ) = ½ Σ_{μν} Q_{μν} tr(ρ A_ν) A_μ,    A_μ = (I + e_μ·σ)/2.
//! ```
//!
//! The operators `A_μ/√2` are orthonormal, so the superoperator of `E_Q` is
//! unitarily similar to `Q` itself. Composition and spectra carry over, and
//! `E_Q` acts on Bloch vectors exactly as `Q` acts on tetrahedron
//! coordinates: `r ↦ Λr + t`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{
    c64, eigenvalues, gamma_involution, hermitian_eig, is_rotation, match_spectra, ComplexMat,
    RealMat,
};
use crate::stochastic::{self, NormalForm, StochMat4};
use crate::superop;
use crate::tetra::VERTICES;
use crate::EIGEN_FLOOR;

/// Tolerance used for the flags stored on a [`QubitChannel`].
pub const CHANNEL_TOL: f64 = 1e-10;

/// `[I, σ_x, σ_y, σ_z]`.
pub fn pauli() -> [ComplexMat; 4] {
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        ComplexMat::identity(2),
        ComplexMat::from_rows(&[[o, one], [one, o]]),
        ComplexMat::from_rows(&[[o, -i], [i, o]]),
        ComplexMat::from_rows(&[[one, o], [o, -one]]),
    ]
}

/// `Σ r_i σ_i`.
pub fn dot_sigma(r: &[f64; 3]) -> ComplexMat {
    let p = pauli();
    let mut out = ComplexMat::zeros(2, 2);
    for i in 0..3 {
        out = &out + &p[i + 1].scale(c64(r[i], 0.0));
    }
    out
}

/// `A_μ = (I + e_μ·σ)/2`. Hermitian with unit trace, `tr(A_μ A_ν) = 2δ_{μν}`,
/// `Σ A_μ = 2I`; each has eigenvalues `(1 ± √3)/2` and so is not positive.
pub fn a_basis() -> [ComplexMat; 4] {
    VERTICES.map(|e| (&ComplexMat::identity(2) + &dot_sigma(&e)).scale(c64(0.5, 0.0)))
}

/// Density matrix `(I + r·σ)/2`.
pub fn density_from_bloch(r: &[f64; 3]) -> ComplexMat {
    (&ComplexMat::identity(2) + &dot_sigma(r)).scale(c64(0.5, 0.0))
}

/// Bloch vector `r_i = tr(ρ σ_i)`.
pub fn bloch_vector(rho: &ComplexMat) -> [f64; 3] {
    let p = pauli();
    [1, 2, 3].map(|i| superop::trace_inner(rho, &p[i]).re)
}

/// Superoperator of `E_Q` for any 4×4 real `q` (stochastic or not).
pub fn superoperator(q: &RealMat) -> Result<ComplexMat> {
    q.require_shape(4, 4)?;
    let a = a_basis();
    let half: Vec<ComplexMat> = a.iter().map(|m| m.scale(c64(0.5, 0.0))).collect();
    Ok(superop::from_frames(q, &half, &a))
}

/// A linear map on 2×2 matrices, kept in superoperator and Choi form.
#[derive(Debug, Clone)]
pub struct QubitChannel {
    pub superop: ComplexMat,
    /// `τ = (E ⊗ id)(|ω⟩⟨ω|)`, `|ω⟩ = (|00⟩ + |11⟩)/√2`.
    pub choi: ComplexMat,
    /// Descending.
    pub choi_eigenvalues: Vec<f64>,
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub unital: bool,
    /// The classical matrix this channel was built from, when known.
    pub source: Option<RealMat>,
}

impl QubitChannel {
    pub fn from_superop(superop: ComplexMat) -> Result<Self> {
        superop.require_shape(4, 4)?;
        let choi = choi_by_definition(&superop);
        debug_assert!(
            gamma_involution(&superop)
                .unwrap()
                .distance(&choi.scale(c64(2.0, 0.0)))
                <= 1e-12 * (1.0 + superop.frobenius_norm())
        );
        let eig = hermitian_eig(&choi)?;
        let trace_defect = superop::trace_out_output(&choi, 2)
            .distance(&ComplexMat::identity(2).scale(c64(0.5, 0.0)));
        let unital_defect = superop::unitality_defect(&superop);
        Ok(Self {
            completely_positive: eig.min_eigenvalue() >= -EIGEN_FLOOR,
            trace_preserving: trace_defect <= CHANNEL_TOL,
            unital: unital_defect <= CHANNEL_TOL,
            choi_eigenvalues: eig.eigenvalues,
            choi,
            superop,
            source: None,
        })
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.choi_eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_cptp(&self) -> bool {
        self.completely_positive && self.trace_preserving
    }

    /// Acts on an arbitrary 2×2 operator, without state validation.
    pub fn act(&self, x: &ComplexMat) -> ComplexMat {
        superop::apply(&self.superop, x)
    }
}

/// `½ Σ_{ij} E(|i⟩⟨j|) ⊗ |i⟩⟨j|`.
fn choi_by_definition(s: &ComplexMat) -> ComplexMat {
    let mut choi = ComplexMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMat::zeros(2, 2);
            unit[(i, j)] = c64(1.0, 0.0);
            let out = superop::apply(s, &unit);
            for a in 0..2 {
                for c in 0..2 {
                    choi[(a * 2 + i, c * 2 + j)] += out[(a, c)] * 0.5;
                }
            }
        }
    }
    choi
}

/// `Q ↦ E_Q`.
pub fn map_to_channel(q: &RealMat) -> Result<QubitChannel> {
    let mut ch = QubitChannel::from_superop(superoperator(q)?)?;
    ch.source = Some(q.clone());
    Ok(ch)
}

/// Choi matrix and its eigenvalues (descending).
pub fn choi(channel: &QubitChannel) -> (&ComplexMat, &[f64]) {
    (&channel.choi, &channel.choi_eigenvalues)
}

/// CP / TP / unital verdicts with the evidence behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub unital: bool,
    pub choi_eigenvalues: Vec<f64>,
    pub min_choi_eigenvalue: f64,
    /// `‖tr₁ τ − I/2‖_F`.
    pub partial_trace_defect: f64,
    /// Max column-sum deviation of the source matrix.
    pub column_sum_defect: Option<f64>,
    /// `‖E(I) − I‖_F`.
    pub identity_image_defect: f64,
    /// Max row-sum deviation of the source matrix.
    pub row_sum_defect: Option<f64>,
    pub tol: f64,
}

impl Certificate {
    pub fn is_unital_channel(&self) -> bool {
        self.completely_positive && self.trace_preserving && self.unital
    }
}

// Two routes contradicting each other only counts as an inconsistency when
// one is clearly inside tolerance and the other clearly outside.
const ROUTE_GAP: f64 = 100.0;

fn cross_check(what: &str, operator: f64, classical: Option<f64>, tol: f64) -> Result<bool> {
    let op_ok = operator <= tol;
    if let Some(c) = classical {
        let c_ok = c <= tol;
        if op_ok != c_ok && operator.max(c) > ROUTE_GAP * tol {
            return Err(Error::InconsistentCertificate(format!(
                "{what}: operator route defect {operator:e}, classical route defect {c:e}"
            )));
        }
    }
    Ok(op_ok)
}

/// Certifies complete positivity (Choi spectrum), trace preservation
/// (partial trace of the Choi matrix, cross-checked against column sums of
/// the source) and unitality (`E(I) = I`, cross-checked against row sums).
pub fn certify(channel: &QubitChannel, tol: f64) -> Result<Certificate> {
    let partial_trace_defect = superop::trace_out_output(&channel.choi, 2)
        .distance(&ComplexMat::identity(2).scale(c64(0.5, 0.0)));
    let identity_image_defect = superop::unitality_defect(&channel.superop);
    let flags = channel
        .source
        .as_ref()
        .map(|q| stochastic::classify(q, tol))
        .transpose()?;
    let column_sum_defect = flags.as_ref().map(|f| f.max_column_deviation);
    let row_sum_defect = flags.as_ref().map(|f| f.max_row_deviation);
    let trace_preserving = cross_check(
        "trace preservation",
        partial_trace_defect,
        column_sum_defect,
        tol,
    )?;
    let unital = cross_check("unitality", identity_image_defect, row_sum_defect, tol)?;
    let min_choi_eigenvalue = channel.min_choi_eigenvalue();
    Ok(Certificate {
        completely_positive: min_choi_eigenvalue >= -EIGEN_FLOOR,
        trace_preserving,
        unital,
        choi_eigenvalues: channel.choi_eigenvalues.clone(),
        min_choi_eigenvalue,
        partial_trace_defect,
        column_sum_defect,
        identity_image_defect,
        row_sum_defect,
        tol,
    })
}

/// Unit quaternion `(w, x, y, z)` of a rotation matrix.
fn quaternion_of(r: &RealMat) -> [f64; 4] {
    let tr = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
    let q = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        [
            0.25 * s,
            (r[(2, 1)] - r[(1, 2)]) / s,
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(1, 0)] - r[(0, 1)]) / s,
        ]
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        [
            (r[(2, 1)] - r[(1, 2)]) / s,
            0.25 * s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
        ]
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        [
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            0.25 * s,
            (r[(1, 2)] + r[(2, 1)]) / s,
        ]
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        [
            (r[(1, 0)] - r[(0, 1)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
            (r[(1, 2)] + r[(2, 1)]) / s,
            0.25 * s,
        ]
    };
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.map(|x| x / n)
}

/// 2×2 unitary `U` with `U A_μ U⁻¹ = Σ_ν S_{μν} A_ν`, where `S` is the
/// embedding of `s_hat`. Equivalently `E_S(ρ) = U⁻¹ ρ U`.
///
/// The rotation by angle θ about axis n lifts to `U = exp(+iθ n·σ/2)`; the
/// global phase is fixed so the largest-magnitude entry is real positive.
pub fn unitary_lift(s_hat: &RealMat) -> Result<ComplexMat> {
    if s_hat.rows() != 3 || s_hat.cols() != 3 {
        return Err(Error::NotARotation(format!(
            "{}x{} input",
            s_hat.rows(),
            s_hat.cols()
        )));
    }
    if !is_rotation(s_hat, 1e-9) {
        return Err(Error::NotARotation(format!(
            "determinant {:.6}, orthogonality defect {:.3e}",
            s_hat.determinant(),
            (&s_hat.transpose() * s_hat).distance(&RealMat::identity(3))
        )));
    }
    let [w, x, y, z] = quaternion_of(s_hat);
    let p = pauli();
    let mut u = p[0].scale(c64(w, 0.0));
    for (k, comp) in [x, y, z].into_iter().enumerate() {
        u = &u + &p[k + 1].scale(c64(0.0, comp));
    }
    Ok(fix_phase(u))
}

fn fix_phase(u: ComplexMat) -> ComplexMat {
    let max = u.max_abs();
    let pivot = u
        .as_slice()
        .iter()
        .find(|z| z.norm() >= max - 1e-12)
        .copied()
        .unwrap_or(c64(1.0, 0.0));
    if pivot.norm() == 0.0 {
        return u;
    }
    u.scale(pivot.conj() / pivot.norm())
}

/// Standard decomposition `E_Q(ρ) = U⁻¹ E_{Q_n}(V⁻¹ ρ V) U`.
#[derive(Debug, Clone)]
pub struct ChannelDecomposition {
    pub normal_form: NormalForm,
    pub u: ComplexMat,
    pub v: ComplexMat,
    pub normal_channel: QubitChannel,
}

impl ChannelDecomposition {
    /// Superoperator of `ρ ↦ U⁻¹ E_{Q_n}(V⁻¹ ρ V) U`.
    pub fn reconstruct_superop(&self) -> ComplexMat {
        let outer = superop::sandwich(&self.u.adjoint(), &self.u);
        let inner = superop::sandwich(&self.v.adjoint(), &self.v);
        &(&outer * &self.normal_channel.superop) * &inner
    }
}

pub fn decompose_channel(q: &StochMat4) -> Result<ChannelDecomposition> {
    let nf = stochastic::normal_form(q)?;
    let u = unitary_lift(&nf.s_hat)?;
    let v = unitary_lift(&nf.t_hat)?;
    let normal_channel = map_to_channel(&nf.q_n())?;
    Ok(ChannelDecomposition {
        normal_form: nf,
        u,
        v,
        normal_channel,
    })
}

/// Comparison between the spectrum of `Q` and that of `E_Q`.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub classical: Vec<Complex64>,
    pub quantum: Vec<Complex64>,
    /// Largest distance under the optimal pairing of the two multisets.
    pub max_pair_distance: f64,
    /// `‖E_Q(X_v) − v X_v‖_F / ‖X_v‖_F` for each eigenvector tested.
    pub eigenvector_residuals: Vec<f64>,
    /// Eigenvalue clusters skipped because `Q` is defective there.
    pub defective_clusters: usize,
}

impl SpectralReport {
    pub fn max_residual(&self) -> f64 {
        self.eigenvector_residuals
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn holds(&self, spectrum_tol: f64, residual_tol: f64) -> bool {
        self.max_pair_distance <= spectrum_tol && self.max_residual() <= residual_tol
    }
}

const CLUSTER_RADIUS: f64 = 1e-6;
const NULL_SINGULAR_TOL: f64 = 1e-6;

/// Checks that `Q` and `E_Q` share eigenvalues, and that every eigenvector
/// `v` of `Q` yields an eigen-operator `X_v = Σ v_α A_α` of `E_Q`.
pub fn spectral_check(q: &RealMat) -> Result<SpectralReport> {
    q.require_shape(4, 4)?;
    let s = superoperator(q)?;
    let classical = eigenvalues(&q.to_complex())?;
    let quantum = eigenvalues(&s)?;
    let max_pair_distance = match_spectra(&classical, &quantum);

    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for &ev in &classical {
        match clusters
            .iter_mut()
            .find(|c| (c[0] - ev).norm() <= CLUSTER_RADIUS)
        {
            Some(c) => c.push(ev),
            None => clusters.push(vec![ev]),
        }
    }

    let a = a_basis();
    let qc = q.to_complex();
    let scale = q.frobenius_norm().max(1.0);
    let mut residuals = Vec::new();
    let mut defective = 0;
    for cluster in clusters {
        let m = cluster.len();
        let value = cluster.iter().sum::<Complex64>() / m as f64;
        let shifted = &qc - &ComplexMat::identity(4).scale(value);
        let gram = &shifted.adjoint() * &shifted;
        let eig = hermitian_eig(&gram)?;
        // smallest m singular directions
        let null_dirs: Vec<usize> = (4 - m..4)
            .filter(|&k| eig.eigenvalues[k].max(0.0).sqrt() <= NULL_SINGULAR_TOL * scale)
            .collect();
        if null_dirs.len() < m {
            defective += 1;
            continue;
        }
        for k in null_dirs {
            let v = eig.eigenvectors.column(k);
            let mut x = ComplexMat::zeros(2, 2);
            for (alpha, coef) in v.iter().enumerate() {
                x = &x + &a[alpha].scale(*coef);
            }
            let image = superop::apply(&s, &x);
            let res = image.distance(&x.scale(value)) / x.frobenius_norm();
            residuals.push(res);
        }
    }
    Ok(SpectralReport {
        classical,
        quantum,
        max_pair_distance,
        eigenvector_residuals: residuals,
        defective_clusters: defective,
    })
}

/// Applies a CPTP channel to a density matrix.
pub fn apply(channel: &QubitChannel, rho: &ComplexMat) -> Result<ComplexMat> {
    validate_state(rho)?;
    if !channel.is_cptp() {
        return Err(Error::NotAChannel(format!(
            "completely positive: {}, trace preserving: {}",
            channel.completely_positive, channel.trace_preserving
        )));
    }
    let out = channel.act(rho);
    // Remove rounding-level anti-Hermitian noise.
    Ok(ComplexMat::from_fn(2, 2, |i, j| {
        (out[(i, j)] + out[(j, i)].conj()) * 0.5
    }))
}

const STATE_TOL: f64 = 1e-9;

fn validate_state(rho: &ComplexMat) -> Result<()> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::InvalidState(format!(
            "{}x{} input",
            rho.rows(),
            rho.cols()
        )));
    }
    if !rho.is_finite() {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    let herm = rho.hermiticity_defect();
    if herm > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (defect {herm:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - c64(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    let min = hermitian_eig(rho)?.min_eigenvalue();
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}
