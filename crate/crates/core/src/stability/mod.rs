//! Convergence-rate evaluation for memory schemes.
//!
//! After the graph Fourier transform each nonzero Laplacian eigenvalue λ
//! contributes an independent scalar recurrence whose state matrix is the
//! companion matrix Γ(λ). Its characteristic polynomial is
//!
//! ```text
//! p(z, λ) = z^(M+1) + (ε₀λ − 1 − θ₀) z^M + Σ_{m=1..M} (ε_mλ − θ_m) z^(M−m)
//! ```
//!
//! and the consensus rate is `r_M = max_{i ≥ 2} ρ(Γ(λᵢ))`.

mod jury;
pub mod roots;
mod routh;

pub use jury::{jury_feasible, jury_stable_quadratic, JuryCheck};
pub use routh::{routh_star_check, RouthCheck, RouthRow};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scheme::MemoryScheme;
use crate::spectral::SpectralSummary;

/// Grid resolution used by [`worst_case_rate`] callers that do not choose one.
pub const DEFAULT_GRID_POINTS: usize = 401;
/// Eigenvalues at or below this are treated as zero when checking connectivity.
pub const CONNECTIVITY_TOLERANCE: f64 = 1e-9;

/// Monic characteristic polynomial of Γ(λ), highest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coeffs: Vec<f64>,
    pub lambda: f64,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        roots::eval(&self.coeffs, z)
    }

    pub fn roots(&self) -> Result<Vec<Complex64>> {
        roots::polynomial_roots(&self.coeffs)
    }
}

pub fn char_poly(scheme: &MemoryScheme, lambda: f64) -> CharPoly {
    let eps = scheme.eps();
    let theta = scheme.theta();
    let mut coeffs = Vec::with_capacity(eps.len() + 1);
    coeffs.push(1.0);
    coeffs.push(eps[0] * lambda - 1.0 - theta[0]);
    coeffs.extend(eps.iter().zip(theta).skip(1).map(|(e, t)| e * lambda - t));
    CharPoly { coeffs, lambda }
}

/// The `(M+1)×(M+1)` state matrix Γ(λ) acting on `[x̂(k), …, x̂(k−M)]`.
pub fn companion_matrix(scheme: &MemoryScheme, lambda: f64) -> DenseMatrix {
    let eps = scheme.eps();
    let theta = scheme.theta();
    let size = eps.len();
    let mut g = DenseMatrix::zeros(size, size);
    g[(0, 0)] = 1.0 + theta[0] - eps[0] * lambda;
    for m in 1..size {
        g[(0, m)] = theta[m] - eps[m] * lambda;
        g[(m, m - 1)] = 1.0;
    }
    g
}

/// Largest root modulus of a monic polynomial of degree ≥ 1.
pub fn spectral_radius(poly: &CharPoly) -> Result<f64> {
    if poly.coeffs.len() < 2 {
        return Err(Error::InvalidParameter("spectral radius needs degree >= 1".into()));
    }
    Ok(poly.roots()?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// ρ(Γ(λ)) for one eigenvalue.
pub fn radius_at(scheme: &MemoryScheme, lambda: f64) -> Result<f64> {
    spectral_radius(&char_poly(scheme, lambda))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `(λᵢ, ρ(Γ(λᵢ)))` for every nonzero eigenvalue, in input order.
    pub per_lambda: Vec<(f64, f64)>,
    pub rate: f64,
    pub argmax_lambda: f64,
}

/// Convergence rate of `scheme` on the network described by `summary`.
pub fn rate_report(scheme: &MemoryScheme, summary: &SpectralSummary) -> Result<RateReport> {
    let lambda2 = summary.lambda2();
    if lambda2 <= CONNECTIVITY_TOLERANCE {
        return Err(Error::Disconnected(lambda2));
    }
    rate_report_for_eigenvalues(scheme, summary.nonzero_eigenvalues())
}

/// Convergence rate over an explicit list of nonzero eigenvalues, e.g. the
/// two-point spectrum `{λ₂, λ_N}` when only the extremes are known.
pub fn rate_report_for_eigenvalues(scheme: &MemoryScheme, lambdas: &[f64]) -> Result<RateReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("no eigenvalues to evaluate".into()));
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l > CONNECTIVITY_TOLERANCE)) {
        return Err(Error::Disconnected(bad));
    }
    let mut per_lambda: Vec<(f64, f64)> = Vec::with_capacity(lambdas.len());
    let mut last: Option<(f64, f64)> = None;
    for &lambda in lambdas {
        // Sorted spectra repeat eigenvalues; reuse the previous evaluation.
        let radius = match last {
            Some((l, r)) if l == lambda => r,
            _ => radius_at(scheme, lambda)?,
        };
        last = Some((lambda, radius));
        per_lambda.push((lambda, radius));
    }
    let (argmax_lambda, rate) =
        per_lambda.iter().copied().fold(
            (f64::NAN, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    Ok(RateReport {
        per_lambda,
        rate,
        argmax_lambda,
    })
}

fn check_interval(alpha: f64, beta: f64) -> Result<()> {
    if alpha > 0.0 && beta >= alpha && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInterval { alpha, beta })
    }
}

/// Uniform grid on `[alpha, beta]` including both endpoints exactly.
pub fn lambda_grid(alpha: f64, beta: f64, points: usize) -> Result<Vec<f64>> {
    check_interval(alpha, beta)?;
    if points < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let step = (beta - alpha) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { beta } else { alpha + step * i as f64 })
        .collect())
}

/// `(λ, ρ(Γ(λ)))` along a uniform grid on `[alpha, beta]`.
pub fn radius_profile(scheme: &MemoryScheme, alpha: f64, beta: f64, grid_points: usize) -> Result<Vec<(f64, f64)>> {
    lambda_grid(alpha, beta, grid_points)?
        .into_iter()
        .map(|l| Ok((l, radius_at(scheme, l)?)))
        .collect()
}

/// Worst-case rate over all networks with nonzero eigenvalues in
/// `[alpha, beta]`, approximated on a uniform λ-grid.
pub fn worst_case_rate(scheme: &MemoryScheme, alpha: f64, beta: f64, grid_points: usize) -> Result<f64> {
    Ok(radius_profile(scheme, alpha, beta, grid_points)?
        .into_iter()
        .map(|(_, r)| r)
        .fold(0.0, f64::max))
}

/// Largest root modulus of `p(z, 0)/(z − 1)`, the consensus direction with
/// its invariant root removed.
///
/// Equal initial history keeps these modes unexcited in exact arithmetic,
/// but when this exceeds 1 rounding errors grow along them and the network
/// average drifts.
pub fn consensus_mode_radius(scheme: &MemoryScheme) -> Result<f64> {
    let p = char_poly(scheme, 0.0);
    let mut q = Vec::with_capacity(p.coeffs.len() - 1);
    let mut acc = 0.0;
    for &c in &p.coeffs[..p.coeffs.len() - 1] {
        acc += c;
        q.push(acc);
    }
    if q.len() < 2 {
        return Ok(0.0);
    }
    Ok(roots::polynomial_roots(&q)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}
