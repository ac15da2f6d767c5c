//! Eigenvalue routines for small dense matrices.
//!
//! Hermitian input goes through cyclic complex Jacobi, which returns an
//! orthonormal eigenbasis. General (non-normal) input only needs eigenvalues
//! here; those come from Hessenberg reduction followed by single-shift complex
//! QR with deflation.

use num_complex::Complex64;

use super::matrix::{ComplexMat, RealMat};
use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-13;
const HERMITIAN_REL_TOL: f64 = 1e-9;

/// Eigen-decomposition of a Hermitian matrix.
///
/// `eigenvalues` are sorted descending and column `k` of `eigenvectors`
/// belongs to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMat,
}

impl EigenResult {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMat {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMat::from_fn(n, n, |i, j| {
            (0..n).fold(Complex64::new(0.0, 0.0), |acc, k| {
                acc + v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()
            })
        })
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
pub fn hermitian_eig(m: &ComplexMat) -> Result<EigenResult> {
    let n = m.require_square()?;
    let norm = m.frobenius_norm();
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_REL_TOL * norm {
        return Err(Error::NotHermitian {
            defect: if norm > 0.0 { defect / norm } else { defect },
        });
    }
    // Work on the exact Hermitian part.
    let mut a = ComplexMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMat::identity(n);
    if norm == 0.0 || n < 2 {
        return Ok(finish(a, v));
    }

    let tol = JACOBI_REL_TOL * norm;
    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= tol {
        return Err(Error::NoConvergence {
            routine: "hermitian_eig",
            iterations: JACOBI_MAX_SWEEPS,
        });
    }
    Ok(finish(a, v))
}

/// Convenience wrapper for real symmetric input.
pub fn symmetric_eig(m: &RealMat) -> Result<(Vec<f64>, RealMat)> {
    let res = hermitian_eig(&m.to_complex())?;
    // For real symmetric input every rotation has zero phase, so the
    // eigenvectors stay real.
    Ok((res.eigenvalues, res.eigenvectors.real_part()))
}

fn off_diagonal_norm(a: &ComplexMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMat, v: &mut ComplexMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

fn finish(a: ComplexMat, v: ComplexMat) -> EigenResult {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMat::from_fn(n, n, |i, k| v[(i, order[k])]);
    EigenResult {
        eigenvalues,
        eigenvectors,
    }
}

const QR_MAX_ITER_PER_EIGENVALUE: usize = 200;

/// Eigenvalues of an arbitrary complex square matrix.
///
/// Returned in the order they deflate; callers comparing spectra should match
/// them as multisets (see [`match_spectra`]).
pub fn eigenvalues(m: &ComplexMat) -> Result<Vec<Complex64>> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > QR_MAX_ITER_PER_EIGENVALUE {
            return Err(Error::NoConvergence {
                routine: "eigenvalues",
                iterations: iter,
            });
        }
        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    out.push(h[(0, 0)]);
    Ok(out)
}

/// Eigenvalues of a real square matrix.
pub fn real_eigenvalues(m: &RealMat) -> Result<Vec<Complex64>> {
    eigenvalues(&m.to_complex())
}

fn wilkinson_shift(h: &ComplexMat, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Explicit shifted QR step on the window `lo..=hi` of a Hessenberg matrix.
fn qr_step(h: &mut ComplexMat, lo: usize, hi: usize, shift: Complex64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let g = if r == 0.0 {
            [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ]
        } else {
            [x.conj() / r, y.conj() / r, -y / r, x / r]
        };
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = g[0] * a + g[1] * b;
            h[(k + 1, j)] = g[2] * a + g[3] * b;
        }
        rotations.push(g);
    }
    for (idx, g) in rotations.iter().enumerate() {
        let k = lo + idx;
        for i in lo..=(k + 1).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * g[0].conj() + b * g[1].conj();
            h[(i, k + 1)] = a * g[2].conj() + b * g[3].conj();
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(m: &ComplexMat) -> ComplexMat {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase*|x| e_1, normalized.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2vv†) H (I - 2vv†)
        for j in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (t, vi)| {
                    acc + vi.conj() * h[(k + 1 + t, j)]
                });
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vi * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (t, vi)| {
                    acc + h[(i, k + 1 + t)] * *vi
                });
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vi.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Largest pairwise distance under the best one-to-one pairing of two
/// eigenvalue lists. Exhaustive for up to 8 values, greedy beyond that.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    if n <= 8 {
        let mut used = vec![false; n];
        let mut best = f64::INFINITY;
        search(a, b, 0, &mut used, 0.0, &mut best);
        best
    } else {
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, y)| (j, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }
}

fn search(a: &[Complex64], b: &[Complex64], i: usize, used: &mut [bool], cur: f64, best: &mut f64) {
    if cur >= *best {
        return;
    }
    if i == a.len() {
        *best = cur;
        return;
    }
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            search(a, b, i + 1, used, cur.max((a[i] - b[j]).norm()), best);
            used[j] = false;
        }
    }
}

/// Same as [`match_spectra`] for real lists.
pub fn match_real_spectra(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    // For real values the sorted pairing is optimal for the max distance.
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter()
        .zip(&y)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}
