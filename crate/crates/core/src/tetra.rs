//! Bloch-tetrahedron geometry for probability vectors on four configurations.
//!
//! A probability vector is written `p_μ = (1 + e_μ·r)/4` where the vertex
//! vectors `e_μ` point to the corners of a regular tetrahedron Δ. The point
//! `r = 0` is the uniform distribution and the vertices `r = e_μ` are the
//! deterministic states.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numkernel::RealMat;
use crate::DEFAULT_TOL;

/// Vertex vectors `e_0 .. e_3`.
pub const VERTICES: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

/// Tolerance on `Σ p_μ = 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;

#[inline]
pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orthonormal 4-vector `|e_μ⟩ = (1, e_μ)/2`.
pub fn basis_ket(mu: usize) -> [f64; 4] {
    let e = VERTICES[mu];
    [0.5, 0.5 * e[0], 0.5 * e[1], 0.5 * e[2]]
}

/// Matrix whose column `μ` is `|e_μ⟩` written in the configuration basis.
///
/// Entry `(ν, μ)` is `½·(e_ν)_μ` with the convention `(e_ν)_0 = 1`; the
/// matrix is a symmetric orthogonal Hadamard matrix scaled by ½.
pub fn basis_matrix() -> RealMat {
    RealMat::from_fn(4, 4, |nu, mu| {
        if mu == 0 {
            0.5
        } else {
            0.5 * VERTICES[nu][mu - 1]
        }
    })
}

/// Checks the vertex identities: `e_μ·e_ν = 4δ_{μν} − 1`, `Σ e_μ = 0`,
/// `Σ_μ (e_μ)_i (e_μ)_j = 4δ_{ij}` and orthonormality of `|e_μ⟩`.
pub fn vertex_identities_hold() -> bool {
    let mut ok = true;
    for mu in 0..4 {
        for nu in 0..4 {
            let expect = if mu == nu { 3.0 } else { -1.0 };
            ok &= dot3(&VERTICES[mu], &VERTICES[nu]) == expect;
            let (a, b) = (basis_ket(mu), basis_ket(nu));
            let ip: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            ok &= ip == if mu == nu { 1.0 } else { 0.0 };
        }
    }
    for i in 0..3 {
        ok &= VERTICES.iter().map(|e| e[i]).sum::<f64>() == 0.0;
        for j in 0..3 {
            let s: f64 = VERTICES.iter().map(|e| e[i] * e[j]).sum();
            ok &= s == if i == j { 4.0 } else { 0.0 };
        }
    }
    ok
}

/// Probability vector on four configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbVec4 {
    p: [f64; 4],
}

impl ProbVec4 {
    /// Validates entries in `[0, 1]` (within [`DEFAULT_TOL`]) and unit sum
    /// (within [`PROB_SUM_TOL`]).
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProbability("non-finite entry".into()));
        }
        if let Some((mu, &x)) = p
            .iter()
            .enumerate()
            .find(|(_, &x)| !(-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&x))
        {
            return Err(Error::InvalidProbability(format!(
                "p[{mu}] = {x} outside [0, 1]"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}")));
        }
        Ok(Self { p })
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 4] }
    }

    /// Deterministic state concentrated on configuration `mu`.
    pub fn pure(mu: usize) -> Self {
        let mut p = [0.0; 4];
        p[mu] = 1.0;
        Self { p }
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.p
    }
}

/// Tetrahedron coordinates `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVec {
    pub r: [f64; 3],
}

impl BlochVec {
    pub fn new(r: [f64; 3]) -> Self {
        Self { r }
    }
}

impl From<[f64; 3]> for BlochVec {
    fn from(r: [f64; 3]) -> Self {
        Self { r }
    }
}

/// `r_i = Σ_μ p_μ (e_μ)_i`.
pub fn prob_to_bloch(p: &ProbVec4) -> BlochVec {
    let mut r = [0.0; 3];
    for (mu, &pm) in p.p.iter().enumerate() {
        for (i, ri) in r.iter_mut().enumerate() {
            *ri += pm * VERTICES[mu][i];
        }
    }
    BlochVec { r }
}

/// `p_μ = (1 + e_μ·r)/4`; rejects points outside Δ.
pub fn bloch_to_prob(r: &BlochVec) -> Result<ProbVec4> {
    let m = in_tetrahedron(r, DEFAULT_TOL);
    if !m.inside {
        return Err(Error::OutsideTetrahedron { margins: m.margins });
    }
    let p = VERTICES.map(|e| 0.25 * (1.0 + dot3(&e, &r.r)));
    ProbVec4::new(p)
}

/// Result of a membership test. `margins[μ] = e_μ·r + 1`, which equals
/// `4·p_μ` for the corresponding probability vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub inside: bool,
    pub margins: [f64; 4],
}

/// True iff `e_μ·r ≥ −1 − tol` for every face. Boundary points are inside.
pub fn in_tetrahedron(r: &BlochVec, tol: f64) -> Membership {
    let margins = VERTICES.map(|e| dot3(&e, &r.r) + 1.0);
    Membership {
        inside: margins.iter().all(|&m| m >= -tol),
        margins,
    }
}

/// Uniform sample of Δ by rejection from the cube `[−1, 1]³`.
pub fn sample_tetrahedron<R: Rng + ?Sized>(rng: &mut R) -> BlochVec {
    loop {
        let r = BlochVec::new([
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ]);
        if in_tetrahedron(&r, 0.0).inside {
            return r;
        }
    }
}
