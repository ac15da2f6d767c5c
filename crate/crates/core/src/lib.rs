//! # tetra-bridge
//!
//! A constructive bridge between classical stochastic processes on four
//! configurations and qubit quantum channels, plus the generalization from
//! d²-state stochastic matrices to d-level channels.
//!
//! - [`tetra`]: probability vectors on four configurations as points `r` of the
//!   Bloch tetrahedron, `p_μ = (1 + e_μ·r)/4`.
//! - [`stochastic`]: 4×4 stochastic matrices, their affine form `(t, Λ)` and the
//!   rotation normal form `Q = S·Q_n·T`.
//! - [`qchannel`]: the map `Q ↦ E_Q`, Choi matrices, complete-positivity
//!   certification, unitary lifts of rotations and spectrum preservation.
//! - [`lindblad`]: symmetric classical generators and the Lindblad criterion
//!   for their quantum images.
//! - [`gmap`]: the generalized map built from a pair of operator bases, with
//!   SIC-POVM bases for d = 2 and d = 3.
//!
//! ## Conventions
//!
//! Stochastic matrices are **column stochastic**: `Q_{μν}` is the probability
//! of jumping from configuration `ν` to `μ`, so `|P_{n+1}⟩ = Q|P_n⟩` and every
//! column sums to one. Operators on `d×d` matrices are stored as `d²×d²`
//! superoperators acting on the row-major vectorization `ρ_{ij} ↦ i·d + j`.

pub mod error;
pub mod gmap;
pub mod lindblad;
pub mod numkernel;
pub mod qchannel;
pub mod stochastic;
pub(crate) mod superop;
pub mod tetra;

pub use error::{Error, Result};
pub use numkernel::{ComplexMat, RealMat};

/// Default absolute tolerance for membership and classification tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Floor below which a Choi (or ω⊥) eigenvalue counts as negative.
pub const EIGEN_FLOOR: f64 = 1e-10;
