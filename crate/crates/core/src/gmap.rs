//! Generalized map from d²×d² matrices to maps on d×d operators,
//!
//! ```text
//! E_Q(ρ) = Σ_{μν} Q_{μν} tr(ρ A_ν) B_μ,    Σ_μ A_μ = I,  tr B_ν = 1.
//! ```
//!
//! With positive `A`, `B` every stochastic `Q` yields a CPTP map, and
//! composition picks up the matrix `G_{μν} = tr(A_μ B_ν)`:
//! `E_{Q1} ∘ E_{Q2} = E_{Q1·G·Q2}`.
//!
//! The built-in bases are SIC-POVMs: the tetrahedral one for d = 2 and the
//! Weyl–Heisenberg orbit of the fiducial `(0, 1, −1)/√2` for d = 3. They are
//! a choice made here; any pair satisfying the constraints above is accepted.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{c64, hermitian_eig, symmetric_eig, ComplexMat, RealMat};
use crate::qchannel;
use crate::stochastic;
use crate::superop;
use crate::tetra::VERTICES;
use crate::EIGEN_FLOOR;

/// Tolerance on `Σ A_μ = I`.
pub const FRAME_SUM_TOL: f64 = 1e-10;
/// Tolerance on `tr B_ν = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// Gram condition numbers above this are flagged.
pub const CONDITION_WARN: f64 = 1e8;
const CHANNEL_TOL: f64 = 1e-10;

/// Operator bases `{A_μ}`, `{B_ν}` and their overlap matrix `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPair {
    pub dim: usize,
    pub a: Vec<ComplexMat>,
    pub b: Vec<ComplexMat>,
    /// `g[(μ, ν)] = tr(A_μ B_ν)`.
    pub g: RealMat,
    pub a_positive: Vec<bool>,
    pub b_positive: Vec<bool>,
    pub a_condition: f64,
    pub b_condition: f64,
}

impl BasisPair {
    pub fn all_positive(&self) -> bool {
        self.a_positive.iter().chain(&self.b_positive).all(|&p| p)
    }

    /// Either Gram matrix is worse conditioned than [`CONDITION_WARN`].
    pub fn ill_conditioned(&self) -> bool {
        self.a_condition > CONDITION_WARN || self.b_condition > CONDITION_WARN
    }

    pub fn g_flags(&self) -> stochastic::StochasticFlags {
        stochastic::classify(&self.g, 1e-12).expect("G is square")
    }
}

fn gram_condition(ops: &[ComplexMat], which: &str) -> Result<f64> {
    let n = ops.len();
    let gram = RealMat::from_fn(n, n, |i, j| superop::trace_inner(&ops[i], &ops[j]).re);
    let (values, _) = symmetric_eig(&gram)?;
    let max = values[0];
    let min = values[n - 1];
    if max.is_nan() || max <= 0.0 || min <= 1e-14 * max {
        return Err(Error::ConstraintViolation(format!(
            "{which} operators do not span the Hermitian operator space (Gram eigenvalues {max:e} .. {min:e})"
        )));
    }
    Ok(max / min)
}

/// Checks the basis constraints and computes `G`.
///
/// `tol` governs Hermiticity and the positivity flags; the sum and trace
/// constraints use [`FRAME_SUM_TOL`] and [`TRACE_TOL`].
pub fn validate_basis(a: Vec<ComplexMat>, b: Vec<ComplexMat>, tol: f64) -> Result<BasisPair> {
    let n = a.len();
    let dim = crate::numkernel::exact_sqrt(n)
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::ConstraintViolation(format!("{n} operators is not d² for any d")))?;
    if b.len() != n {
        return Err(Error::ConstraintViolation(format!(
            "{} A operators but {} B operators",
            n,
            b.len()
        )));
    }
    for (name, ops) in [("A", &a), ("B", &b)] {
        for (mu, op) in ops.iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::ConstraintViolation(format!(
                    "{name}[{mu}] is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            if op.hermiticity_defect() > tol {
                return Err(Error::ConstraintViolation(format!(
                    "{name}[{mu}] is not Hermitian"
                )));
            }
        }
    }
    let mut sum = ComplexMat::zeros(dim, dim);
    for op in &a {
        sum = &sum + op;
    }
    let defect = sum.distance(&ComplexMat::identity(dim));
    if defect > FRAME_SUM_TOL {
        return Err(Error::ConstraintViolation(format!(
            "A operators sum to the identity only within {defect:e}"
        )));
    }
    for (nu, op) in b.iter().enumerate() {
        let tr = op.trace();
        if (tr - c64(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::ConstraintViolation(format!("tr B[{nu}] = {tr}")));
        }
    }
    let a_condition = gram_condition(&a, "A")?;
    let b_condition = gram_condition(&b, "B")?;
    let positive = |ops: &[ComplexMat]| -> Result<Vec<bool>> {
        ops.iter()
            .map(|op| Ok(hermitian_eig(op)?.min_eigenvalue() >= -tol))
            .collect()
    };
    let a_positive = positive(&a)?;
    let b_positive = positive(&b)?;
    let g = RealMat::from_fn(n, n, |mu, nu| superop::trace_inner(&a[mu], &b[nu]).re);
    Ok(BasisPair {
        dim,
        a,
        b,
        g,
        a_positive,
        b_positive,
        a_condition,
        b_condition,
    })
}

fn projector(psi: &[Complex64]) -> ComplexMat {
    let d = psi.len();
    ComplexMat::from_fn(d, d, |i, j| psi[i] * psi[j].conj())
}

/// Rank-one SIC projectors for d = 2 or d = 3.
pub fn sic_projectors(d: usize) -> Result<Vec<ComplexMat>> {
    match d {
        2 => {
            let k = 1.0 / 3f64.sqrt();
            Ok(VERTICES
                .iter()
                .map(|e| qchannel::density_from_bloch(&[e[0] * k, e[1] * k, e[2] * k]))
                .collect())
        }
        3 => {
            let s = 1.0 / 2f64.sqrt();
            let fiducial = [c64(0.0, 0.0), c64(s, 0.0), c64(-s, 0.0)];
            let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
            let mut out = Vec::with_capacity(9);
            for shift in 0..3 {
                for clock in 0..3 {
                    // X^shift Z^clock |ψ⟩
                    let mut v = [c64(0.0, 0.0); 3];
                    for (j, amp) in fiducial.iter().enumerate() {
                        v[(j + shift) % 3] = *amp * omega.powu((clock * j) as u32);
                    }
                    out.push(projector(&v));
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// SIC basis pair: `A_μ = Π_μ / d`, `B_μ = Π_μ`.
pub fn sic_basis(d: usize) -> Result<BasisPair> {
    let pis = sic_projectors(d)?;
    let a = pis
        .iter()
        .map(|p| p.scale(c64(1.0 / d as f64, 0.0)))
        .collect();
    validate_basis(a, pis, 1e-12)
}

/// The orthonormal qubit pair behind [`qchannel::map_to_channel`]:
/// `A_μ/2` and `A_μ`. Here `G` is the identity.
pub fn orthonormal_qubit_basis() -> BasisPair {
    let a = qchannel::a_basis();
    let half = a.iter().map(|m| m.scale(c64(0.5, 0.0))).collect();
    validate_basis(half, a.to_vec(), 1e-12).expect("orthonormal basis satisfies the constraints")
}

/// A map on d×d operators built from a basis pair.
#[derive(Debug, Clone)]
pub struct GeneralChannel {
    pub dim: usize,
    pub q: RealMat,
    pub superop: ComplexMat,
    /// `(E ⊗ id)(|ω⟩⟨ω|)` with normalized `|ω⟩ = Σ|ii⟩/√d`.
    pub choi: ComplexMat,
    pub choi_eigenvalues: Vec<f64>,
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub unital: bool,
    pub basis: Arc<BasisPair>,
}

impl GeneralChannel {
    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.choi_eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn act(&self, rho: &ComplexMat) -> ComplexMat {
        superop::apply(&self.superop, rho)
    }
}

fn realize(q: &RealMat, basis: Arc<BasisPair>) -> Result<GeneralChannel> {
    let n = basis.a.len();
    q.require_shape(n, n)?;
    if !q.is_finite() {
        return Err(Error::NonFinite);
    }
    let d = basis.dim;
    let s = superop::from_frames(q, &basis.a, &basis.b);
    let choi = superop::choi(&s)?;
    let eig = hermitian_eig(&choi)?;
    let tp_defect = superop::trace_out_output(&choi, d)
        .distance(&ComplexMat::identity(d).scale(c64(1.0 / d as f64, 0.0)));
    debug_assert!(
        (tp_defect <= CHANNEL_TOL) == (superop::trace_preservation_defect(&s) <= CHANNEL_TOL)
            || tp_defect.min(superop::trace_preservation_defect(&s)) > CHANNEL_TOL / 10.0
    );
    Ok(GeneralChannel {
        dim: d,
        q: q.clone(),
        completely_positive: eig.min_eigenvalue() >= -EIGEN_FLOOR,
        trace_preserving: tp_defect <= CHANNEL_TOL,
        unital: superop::unitality_defect(&s) <= CHANNEL_TOL,
        choi_eigenvalues: eig.eigenvalues,
        choi,
        superop: s,
        basis,
    })
}

/// `E_Q(ρ) = Σ Q_{μν} tr(ρ A_ν) B_μ`. Complete positivity is measured from
/// the Choi spectrum, never assumed.
pub fn build_channel(q: &RealMat, basis: &BasisPair) -> Result<GeneralChannel> {
    let n = basis.a.len();
    if q.rows() != n || q.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", q.rows(), q.cols()),
        });
    }
    realize(q, Arc::new(basis.clone()))
}

/// Result of composing two channels on the same basis.
#[derive(Debug, Clone)]
pub struct Composition {
    /// `superop(c1) · superop(c2)`.
    pub product: ComplexMat,
    /// `E_{Q1·G·Q2}`.
    pub channel: GeneralChannel,
    /// Frobenius distance between the two.
    pub residual: f64,
}

pub fn compose(c1: &GeneralChannel, c2: &GeneralChannel) -> Result<Composition> {
    if !Arc::ptr_eq(&c1.basis, &c2.basis) && *c1.basis != *c2.basis {
        return Err(Error::BasisMismatch);
    }
    let product = &c1.superop * &c2.superop;
    let q = &(&c1.q * &c1.basis.g) * &c2.q;
    let channel = realize(&q, Arc::clone(&c1.basis))?;
    let residual = product.distance(&channel.superop);
    Ok(Composition {
        product,
        channel,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_sic_frame() {
        let basis = sic_basis(2).unwrap();
        let k = 1.0 / 3f64.sqrt();
        for (mu, a) in basis.a.iter().enumerate() {
            let e = VERTICES[mu];
            let expect = (&ComplexMat::identity(2)
                + &qchannel::dot_sigma(&[e[0] * k, e[1] * k, e[2] * k]))
                .scale(c64(0.25, 0.0));
            assert!(a.distance(&expect) < 1e-15);
        }
        for mu in 0..4 {
            for nu in 0..4 {
                let expect = (2.0 * if mu == nu { 1.0 } else { 0.0 } + 1.0) / 6.0;
                assert!((basis.g[(mu, nu)] - expect).abs() < 1e-15);
            }
        }
        assert!(basis.g_flags().is_doubly_stochastic);
        assert!(basis.all_positive());
    }

    #[test]
    fn qutrit_sic_frame() {
        let pis = sic_projectors(3).unwrap();
        assert_eq!(pis.len(), 9);
        let mut sum = ComplexMat::zeros(3, 3);
        for (mu, p) in pis.iter().enumerate() {
            sum = &sum + p;
            for (nu, r) in pis.iter().enumerate() {
                let overlap = superop::trace_inner(p, r).re;
                let expect = (3.0 * if mu == nu { 1.0 } else { 0.0 } + 1.0) / 4.0;
                assert!((overlap - expect).abs() < 1e-10);
            }
        }
        assert!(sum.distance(&ComplexMat::identity(3).scale(c64(3.0, 0.0))) < 1e-10);
        let basis = sic_basis(3).unwrap();
        assert!(basis.all_positive());
        assert!(!basis.ill_conditioned());
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(sic_basis(4), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn orthonormal_pair_is_accepted_but_not_positive() {
        let basis = orthonormal_qubit_basis();
        assert!(basis.a_positive.iter().all(|&p| !p));
        assert!(basis.g.distance(&RealMat::identity(4)) < 1e-15);
    }

    #[test]
    fn rejects_broken_frames() {
        let mut a = sic_basis(2).unwrap().a;
        a[0] = a[0].scale(c64(2.0, 0.0));
        let b = sic_projectors(2).unwrap();
        assert!(matches!(
            validate_basis(a, b.clone(), 1e-12),
            Err(Error::ConstraintViolation(_))
        ));

        let a = sic_basis(2).unwrap().a;
        let mut b2 = b.clone();
        b2[1] = b2[1].scale(c64(0.5, 0.0));
        assert!(validate_basis(a.clone(), b2, 1e-12).is_err());
        assert!(validate_basis(a[..3].to_vec(), b[..3].to_vec(), 1e-12).is_err());

        // repeated operators sum correctly but do not span
        let quarter = ComplexMat::identity(2).scale(c64(0.25, 0.0));
        let half = ComplexMat::identity(2).scale(c64(0.5, 0.0));
        let err = validate_basis(vec![quarter; 4], vec![half; 4], 1e-12).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation(msg) if msg.contains("span")));
    }

    #[test]
    fn identity_on_qubit_sic_is_measure_and_prepare() {
        let basis = sic_basis(2).unwrap();
        let ch = build_channel(&RealMat::identity(4), &basis).unwrap();
        assert!(ch.completely_positive && ch.trace_preserving && ch.unital);
        // ρ ↦ Σ tr(ρ Π_μ/2) Π_μ shrinks Bloch vectors by 1/3
        let rho = qchannel::density_from_bloch(&[0.0, 0.0, 0.9]);
        let out = qchannel::bloch_vector(&ch.act(&rho));
        assert!((out[2] - 0.3).abs() < 1e-14 && out[0].abs() < 1e-14);
    }

    #[test]
    fn flat_matrix_gives_fixed_output() {
        for d in [2usize, 3] {
            let n = d * d;
            let basis = sic_basis(d).unwrap();
            let q = RealMat::from_fn(n, n, |_, _| 1.0 / n as f64);
            let ch = build_channel(&q, &basis).unwrap();
            assert!(ch.trace_preserving && ch.unital && ch.completely_positive);
            let mut rho = ComplexMat::zeros(d, d);
            rho[(0, 0)] = c64(1.0, 0.0);
            let expect = ComplexMat::identity(d).scale(c64(1.0 / d as f64, 0.0));
            assert!(ch.act(&rho).distance(&expect) < 1e-14);
        }
    }

    #[test]
    fn random_qutrit_channels_are_cptp() {
        let basis = sic_basis(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let q = stochastic::random_column_stochastic(9, &mut rng);
            let ch = build_channel(&q, &basis).unwrap();
            assert!(ch.completely_positive && ch.trace_preserving);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let basis = sic_basis(2).unwrap();
        assert!(matches!(
            build_channel(&RealMat::identity(9), &basis),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compose_with_identity_picks_up_g() {
        let basis = sic_basis(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q1 = stochastic::random_column_stochastic(4, &mut rng);
        let c1 = build_channel(&q1, &basis).unwrap();
        let id = build_channel(&RealMat::identity(4), &basis).unwrap();
        let comp = compose(&c1, &id).unwrap();
        assert!(comp.residual < 1e-12);
        assert!(comp.channel.q.distance(&(&q1 * &basis.g)) < 1e-15);
    }

    #[test]
    fn orthonormal_pair_recovers_plain_homomorphism() {
        let basis = orthonormal_qubit_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q1 = stochastic::random_column_stochastic(4, &mut rng);
        let q2 = stochastic::random_column_stochastic(4, &mut rng);
        let c1 = build_channel(&q1, &basis).unwrap();
        let c2 = build_channel(&q2, &basis).unwrap();
        let comp = compose(&c1, &c2).unwrap();
        assert!(comp.residual < 1e-12);
        assert!(
            comp.channel
                .superop
                .distance(&qchannel::superoperator(&(&q1 * &q2)).unwrap())
                < 1e-12
        );
    }

    #[test]
    fn compose_rejects_mixed_bases() {
        let c1 = build_channel(&RealMat::identity(4), &sic_basis(2).unwrap()).unwrap();
        let c2 = build_channel(&RealMat::identity(4), &orthonormal_qubit_basis()).unwrap();
        assert!(matches!(compose(&c1, &c2), Err(Error::BasisMismatch)));
    }
}
