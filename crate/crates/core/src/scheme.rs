//! Control-parameter schemes for the memory-augmented consensus protocol
//!
//! ```text
//! x(k+1) = [(1+θ₀)I − ε₀L] x(k) + Σ_{m=1..M} (θ_m I − ε_m L) x(k−m)
//! ```
//!
//! `ε_m` weighs the neighbour-deviation term `m` steps back ("state
//! deviation memory"), `θ_m` the agent's own past state ("node memory").
//! Average consensus requires `Σ θ_m = 0`, which every [`MemoryScheme`]
//! enforces.
//!
//! The closed forms here are the rate-optimal designs for a known spectrum
//! extreme pair `(λ₂, λ_N)`, for an eigenvalue interval `[α, β]` and for
//! star networks, plus the memoryless and one-tap deviation-memory
//! baselines they are compared against.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|Σ θ_m|` accepted by [`MemoryScheme::new`].
pub const THETA_SUM_TOLERANCE: f64 = 1e-12;

/// Memory depth `M` with gains `ε₀..ε_M` and `θ₀..θ_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryScheme {
    eps: Vec<f64>,
    theta: Vec<f64>,
}

impl MemoryScheme {
    pub fn new(eps: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if eps.is_empty() || eps.len() != theta.len() {
            return Err(Error::InvalidParameter(format!(
                "need equally long non-empty gain vectors, got {} eps and {} theta",
                eps.len(),
                theta.len()
            )));
        }
        if eps.iter().chain(&theta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("gains must be finite".into()));
        }
        let sum: f64 = theta.iter().sum();
        if sum.abs() > THETA_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "node-memory gains must sum to zero for average consensus, got {sum:e}"
            )));
        }
        Ok(Self { eps, theta })
    }

    /// Builds a scheme from `θ₀..θ_{M-1}`, fixing `θ_M = −Σ θ_m` so the sum is exactly zero.
    pub fn with_balanced_theta(eps: Vec<f64>, free_theta: &[f64]) -> Result<Self> {
        if free_theta.len() + 1 != eps.len() {
            return Err(Error::InvalidParameter(format!(
                "depth {} needs {} free theta values, got {}",
                eps.len().saturating_sub(1),
                eps.len().saturating_sub(1),
                free_theta.len()
            )));
        }
        let mut theta = free_theta.to_vec();
        let partial: f64 = theta.iter().sum();
        theta.push(-partial);
        Self::new(eps, theta)
    }

    /// Memoryless protocol `u = ε₀ · Σ a_ij (x_j − x_i)`.
    pub fn memoryless(eps0: f64) -> Self {
        Self {
            eps: vec![eps0],
            theta: vec![0.0],
        }
    }

    /// Pure state-deviation memory, all `θ_m = 0`.
    pub fn deviation_only(eps: Vec<f64>) -> Result<Self> {
        let theta = vec![0.0; eps.len()];
        Self::new(eps, theta)
    }

    /// Memory depth `M`.
    pub fn depth(&self) -> usize {
        self.eps.len() - 1
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_sum(&self) -> f64 {
        self.theta.iter().sum()
    }

    /// Same gains embedded at a larger depth, higher taps set to zero.
    pub fn padded(&self, depth: usize) -> Self {
        let mut eps = self.eps.clone();
        let mut theta = self.theta.clone();
        eps.resize(depth.max(self.depth()) + 1, 0.0);
        theta.resize(depth.max(self.depth()) + 1, 0.0);
        Self { eps, theta }
    }
}

/// A scheme with its predicted convergence rate and the spectrum extremes it was designed for.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePrediction {
    pub rate: f64,
    pub scheme: MemoryScheme,
    pub lambda2: f64,
    pub lambda_n: f64,
}

fn check_extremes(lambda2: f64, lambda_n: f64) -> Result<()> {
    if !(lambda2 > 0.0) {
        return Err(Error::Disconnected(lambda2));
    }
    if !(lambda_n >= lambda2) || !lambda_n.is_finite() {
        return Err(Error::InvalidInterval {
            alpha: lambda2,
            beta: lambda_n,
        });
    }
    Ok(())
}

/// `(√b − √a)/(√b + √a)`, exactly zero when the endpoints coincide.
fn sqrt_ratio_rate(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (sa, sb) = (a.sqrt(), b.sqrt());
    (sb - sa) / (sb + sa)
}

/// Best constant (memoryless) gain `ε₀ = 2/(λ₂+λ_N)`, rate `(λ_N−λ₂)/(λ_N+λ₂)`.
pub fn best_constant(lambda2: f64, lambda_n: f64) -> Result<RatePrediction> {
    check_extremes(lambda2, lambda_n)?;
    let rate = if lambda2 == lambda_n {
        0.0
    } else {
        (lambda_n - lambda2) / (lambda_n + lambda2)
    };
    Ok(RatePrediction {
        rate,
        scheme: MemoryScheme::memoryless(2.0 / (lambda2 + lambda_n)),
        lambda2,
        lambda_n,
    })
}

/// Rate-optimal one-tap scheme for a given spectrum.
///
/// The optimum uses node memory only (`ε₁ = 0`):
/// `ε₀ = 4/(√λ_N+√λ₂)²`, `θ₀ = −θ₁ = r²` with `r = (√λ_N−√λ₂)/(√λ_N+√λ₂)`.
pub fn optimal_one_tap(lambda2: f64, lambda_n: f64) -> Result<RatePrediction> {
    check_extremes(lambda2, lambda_n)?;
    let rate = sqrt_ratio_rate(lambda2, lambda_n);
    let s = lambda2.sqrt() + lambda_n.sqrt();
    let theta0 = rate * rate;
    Ok(RatePrediction {
        rate,
        scheme: MemoryScheme {
            eps: vec![4.0 / (s * s), 0.0],
            theta: vec![theta0, -theta0],
        },
        lambda2,
        lambda_n,
    })
}

/// Optimal worst-case scheme over every network whose nonzero Laplacian
/// eigenvalues lie in `[alpha, beta]`, embedded at depth `depth`.
///
/// Extra taps cannot beat the one-tap worst-case optimum, so the one-tap
/// gains are reused and the remaining taps are zero.
pub fn worst_case_scheme(alpha: f64, beta: f64, depth: usize) -> Result<RatePrediction> {
    if !(alpha > 0.0) || !(beta >= alpha) || !beta.is_finite() {
        return Err(Error::InvalidInterval { alpha, beta });
    }
    if depth < 1 {
        return Err(Error::WrongDepth {
            expected: 1,
            got: depth,
        });
    }
    let one_tap = optimal_one_tap(alpha, beta)?;
    Ok(RatePrediction {
        scheme: one_tap.scheme.padded(depth),
        ..one_tap
    })
}

/// One-tap state-deviation memory baseline (`θ ≡ 0`), rate `(λ_N−λ₂)/(λ_N+3λ₂)`.
///
/// The gains place a double root at `−r` for `λ_N` and a root at `r` for
/// `λ₂`: `ε₀ = (1+2r)/λ_N`, `ε₁ = r²/λ_N`.
pub fn sdmem_one_tap(lambda2: f64, lambda_n: f64) -> Result<RatePrediction> {
    check_extremes(lambda2, lambda_n)?;
    let rate = if lambda2 == lambda_n {
        0.0
    } else {
        (lambda_n - lambda2) / (lambda_n + 3.0 * lambda2)
    };
    let scheme = MemoryScheme::deviation_only(vec![(1.0 + 2.0 * rate) / lambda_n, rate * rate / lambda_n])?;
    Ok(RatePrediction {
        rate,
        scheme,
        lambda2,
        lambda_n,
    })
}

/// Two-tap scheme for a star network of `n` nodes (spectrum `{0, 1, …, 1, n}`).
///
/// The rate is the root `r` of `r³ − 3μr² + 3r − μ` in `(0, 1)`,
/// `μ = (n−1)/(n+1)`, with
/// `ε₀ = 6r/(n−1)`, `ε₁ = 0`, `ε₂ = 2r³/(n−1)`,
/// `θ₀ = 8r²/(r²+3)`, `θ₁ = −3r²`, `θ₂ = 3r² − θ₀`.
pub fn star_two_tap(n: usize) -> Result<RatePrediction> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "two-tap star scheme needs at least 3 nodes, got {n}"
        )));
    }
    let nf = n as f64;
    let mu = (nf - 1.0) / (nf + 1.0);
    let r = cubic_real_root(mu)?;
    let r2 = r * r;
    let theta0 = 8.0 * r2 / (r2 + 3.0);
    let theta1 = -3.0 * r2;
    let scheme = MemoryScheme::with_balanced_theta(
        vec![6.0 * r / (nf - 1.0), 0.0, 2.0 * r2 * r / (nf - 1.0)],
        &[theta0, theta1],
    )?;
    Ok(RatePrediction {
        rate: r,
        scheme,
        lambda2: 1.0,
        lambda_n: nf,
    })
}

/// `h(r) = r³ − 3μr² + 3r − μ`.
pub fn star_cubic(mu: f64, r: f64) -> f64 {
    ((r - 3.0 * mu) * r + 3.0) * r - mu
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("mu = {mu} is outside (0, 1)")))
    }
}

/// Unique root of [`star_cubic`] in `(0, 1)`, by bisection.
///
/// `h(0) = −μ < 0`, `h(1) = 4(1 − μ) > 0` and `h' ≥ 3(r − 1)² > 0`, so the
/// bracket always holds exactly one sign change.
pub fn cubic_real_root(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if star_cubic(mu, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // One Newton step from the bracket midpoint tightens the residual to rounding level.
    let mid = 0.5 * (lo + hi);
    let dh = (3.0 * mid - 6.0 * mu) * mid + 3.0;
    let polished = mid - star_cubic(mu, mid) / dh;
    Ok(
        if polished > lo && polished < hi && star_cubic(mu, polished).abs() <= star_cubic(mu, mid).abs() {
            polished
        } else {
            mid
        },
    )
}

/// The same root from Cardano's formula with principal complex cube roots:
/// `r = μ + ∛(q + √D) + ω ∛(q − √D)`, `q = μ³ − μ`, `D = q² + (1 − μ²)³`,
/// `ω = (−1 + i√3)/2`.
pub fn cardano_root(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let q = mu * mu * mu - mu;
    let disc = q * q + (1.0 - mu * mu).powi(3);
    let sqrt_d = Complex64::new(disc, 0.0).sqrt();
    let a = (Complex64::new(q, 0.0) + sqrt_d).cbrt();
    let b = (Complex64::new(q, 0.0) - sqrt_d).cbrt();
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let r = Complex64::new(mu, 0.0) + a + omega * b;
    Ok(r.re)
}
