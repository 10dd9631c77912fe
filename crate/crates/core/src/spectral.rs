//! Symmetric eigendecomposition (cyclic Jacobi) and the graph Fourier
//! transform built on the Laplacian eigenbasis.

use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::matrix::DenseMatrix;

/// Off-diagonal Frobenius norm at which a Jacobi sweep loop stops,
/// relative to `max(1, ‖A‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// |λ₁| below this is snapped to exactly zero.
pub const ZERO_EIGENVALUE_SNAP: f64 = 1e-9;

/// Ascending Laplacian spectrum with its orthonormal eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    eigenvectors: DenseMatrix,
}

impl SpectralSummary {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DenseMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Algebraic connectivity λ₂.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn lambda_n(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn eigenratio(&self) -> f64 {
        self.lambda2() / self.lambda_n()
    }

    /// The nonzero part of a connected spectrum, λ₂..λ_N.
    pub fn nonzero_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[1..]
    }
}

/// Full eigendecomposition of a Laplacian.
///
/// Eigenvectors are sign-normalised so that each has a positive component
/// sum (or, when the sum vanishes, a positive first significant entry); for
/// a connected graph this makes `v₁ = 1/√N · 1`.
pub fn eigendecompose(l: &Laplacian) -> Result<SpectralSummary> {
    let (mut values, vectors) = jacobi_eigen(l.matrix(), true)?;
    let mut vectors = vectors.expect("vectors requested");
    let n = values.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    values = order.iter().map(|&i| values[i]).collect();
    vectors = DenseMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);

    for c in 0..n {
        let sum: f64 = (0..n).map(|r| vectors[(r, c)]).sum();
        let flip = if sum.abs() > 1e-8 {
            sum < 0.0
        } else {
            (0..n)
                .map(|r| vectors[(r, c)])
                .find(|v| v.abs() > 1e-8)
                .is_some_and(|v| v < 0.0)
        };
        if flip {
            for r in 0..n {
                vectors[(r, c)] = -vectors[(r, c)];
            }
        }
    }

    snap_zero(&mut values);
    Ok(SpectralSummary {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Ascending Laplacian eigenvalues without accumulating eigenvectors.
pub fn laplacian_eigenvalues(l: &Laplacian) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi_eigen(l.matrix(), false)?;
    values.sort_by(f64::total_cmp);
    snap_zero(&mut values);
    Ok(values)
}

fn snap_zero(values: &mut [f64]) {
    if let Some(first) = values.first_mut() {
        if first.abs() < ZERO_EIGENVALUE_SNAP {
            *first = 0.0;
        }
    }
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
///
/// Returns unsorted eigenvalues and, when `want_vectors` is set, the matrix
/// whose columns are the matching orthonormal eigenvectors.
pub fn jacobi_eigen(a: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    let scale = a.frobenius_norm().max(1.0);
    let asym = a.max_asymmetry();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = a.clone();
    // Row k of `vt` is eigenvector column k, so rotations touch contiguous rows.
    let mut vt = want_vectors.then(|| DenseMatrix::identity(n));
    let tol = JACOBI_TOLERANCE * scale;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok((values, vt.map(|v| v.transpose())));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, p, q, c, s, t, apq);
                if let Some(v) = vt.as_mut() {
                    rotate_rows(v, p, q, c, s);
                }
            }
        }
    }
    Err(Error::NoConvergence {
        what: "Jacobi eigensolver",
        iterations: JACOBI_MAX_SWEEPS,
    })
}

/// Frobenius norm of the strict upper triangle, counted for both halves.
fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        s += a.row(i)[i + 1..].iter().map(|v| v * v).sum::<f64>();
    }
    (2.0 * s).sqrt()
}

/// Applies `A ← Jᵀ A J` for the rotation annihilating `a[p][q]`, `p < q`.
///
/// Only the upper triangle is kept current; the loop is split so that the
/// parts lying in rows `p` and `q` are walked contiguously.
fn rotate(a: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, t: f64, apq: f64) {
    let n = a.rows();
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    for k in 0..p {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in p + 1..q {
        let akp = a[(p, k)];
        let akq = a[(k, q)];
        a[(p, k)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    let (row_p, row_q) = two_rows(a, p, q);
    for (akp, akq) in row_p[q + 1..n].iter_mut().zip(&mut row_q[q + 1..n]) {
        let (vp, vq) = (*akp, *akq);
        *akp = c * vp - s * vq;
        *akq = s * vp + c * vq;
    }
}

fn two_rows(a: &mut DenseMatrix, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let n = a.cols();
    let (head, tail) = a.as_mut_slice().split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}

fn rotate_rows(vt: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = vt.cols();
    for k in 0..n {
        let vp = vt[(p, k)];
        let vq = vt[(q, k)];
        vt[(p, k)] = c * vp - s * vq;
        vt[(q, k)] = s * vp + c * vq;
    }
}

/// Graph Fourier transform `x̂ᵢ = vᵢᵀ x`.
pub fn gft(summary: &SpectralSummary, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(summary, x.len())?;
    summary.eigenvectors.transpose().mul_vec(x)
}

/// Inverse transform `x = V x̂`.
pub fn inverse_gft(summary: &SpectralSummary, coeffs: &[f64]) -> Result<Vec<f64>> {
    check_dim(summary, coeffs.len())?;
    summary.eigenvectors.mul_vec(coeffs)
}

fn check_dim(summary: &SpectralSummary, got: usize) -> Result<()> {
    if got != summary.dim() {
        return Err(Error::DimensionMismatch {
            expected: summary.dim(),
            got,
        });
    }
    Ok(())
}
