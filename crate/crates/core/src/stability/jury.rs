//! Jury-criterion certificate for one-tap schemes.
//!
//! Substituting `z = r z̃` maps "all roots within radius `r`" onto the unit
//! disc. For the quadratics at the spectrum extremes λ₂ and λ_N the Jury
//! conditions `d(1) ≥ 0`, `d(−1) ≥ 0`, `r² ≥ |constant term|` give six
//! inequalities in `(ε₀, ε₁, θ₀)`.

/// Slack at or above this counts as satisfied ("in or on" the circle).
pub const SLACK_TOLERANCE: f64 = -1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JuryCheck {
    pub feasible: bool,
    /// `[d₂(1), d_N(1), d₂(−1), d_N(−1), r² − c₂, r² − c_N]` for the
    /// radius-scaled quadratics at λ₂ and λ_N.
    pub slacks: [f64; 6],
}

/// Whether `(eps0, eps1, theta0)` with `θ₁ = −θ₀` places every root of the
/// extreme-eigenvalue quadratics inside or on the circle of radius `r`.
pub fn jury_feasible(r: f64, eps0: f64, eps1: f64, theta0: f64, lambda2: f64, lambda_n: f64) -> JuryCheck {
    let linear = |lambda: f64| eps0 * lambda - theta0 - 1.0;
    let constant = |lambda: f64| eps1 * lambda + theta0;
    let r2 = r * r;
    let slacks = [
        r2 + linear(lambda2) * r + constant(lambda2),
        r2 + linear(lambda_n) * r + constant(lambda_n),
        r2 - linear(lambda2) * r + constant(lambda2),
        r2 - linear(lambda_n) * r + constant(lambda_n),
        r2 - constant(lambda2),
        r2 - constant(lambda_n),
    ];
    JuryCheck {
        feasible: slacks.iter().all(|&s| s >= SLACK_TOLERANCE),
        slacks,
    }
}

/// Strict Jury test for `z² + a1 z + a0`: both roots in the open unit disc.
pub fn jury_stable_quadratic(a1: f64, a0: f64) -> bool {
    1.0 + a1 + a0 > 0.0 && 1.0 - a1 + a0 > 0.0 && a0.abs() < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::optimal_one_tap;

    const G1_L2: f64 = 0.8835;
    const G1_LN: f64 = 7.1716;

    #[test]
    fn optimum_is_feasible_with_binding_constraints() {
        let p = optimal_one_tap(G1_L2, G1_LN).unwrap();
        let s = &p.scheme;
        let check = jury_feasible(p.rate, s.eps()[0], s.eps()[1], s.theta()[0], G1_L2, G1_LN);
        assert!(check.feasible, "{check:?}");
        for idx in [0, 3, 4, 5] {
            assert!(check.slacks[idx].abs() < 1e-12, "{idx}: {check:?}");
        }
        for idx in [1, 2] {
            assert!(check.slacks[idx] > 0.1, "{idx}: {check:?}");
        }
    }

    #[test]
    fn marginal_zero_scheme() {
        let check = jury_feasible(1.0, 0.0, 0.0, 0.0, G1_L2, G1_LN);
        assert!(check.feasible, "{check:?}");
    }

    #[test]
    fn below_optimal_radius_is_infeasible() {
        let p = optimal_one_tap(G1_L2, G1_LN).unwrap();
        let s = &p.scheme;
        let check = jury_feasible(0.99 * p.rate, s.eps()[0], s.eps()[1], s.theta()[0], G1_L2, G1_LN);
        assert!(!check.feasible);
        assert!(check.slacks.iter().any(|&v| v < -1e-6));
    }

    #[test]
    fn strict_quadratic_test() {
        assert!(jury_stable_quadratic(0.0, 0.25));
        assert!(!jury_stable_quadratic(0.0, -1.0));
        assert!(!jury_stable_quadratic(-2.5, 1.0));
    }
}
