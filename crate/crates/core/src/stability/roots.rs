//! Durand–Kerner (Weierstrass) simultaneous root iteration with a polish
//! step for clustered roots.
//!
//! Rate-optimal schemes deliberately place repeated roots at the spectrum
//! extremes (double roots for the one-tap optimum, triple roots for the
//! two-tap star scheme). A repeated root is ill-conditioned: plain iteration
//! leaves the copies scattered around it at distance ~ε^(1/k). A cluster of
//! `k` approximations is therefore collapsed onto the nearby root of the
//! `(k−1)`-th derivative whenever the Taylor coefficients there confirm a
//! `k`-fold root, which recovers it to working precision.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;
/// Iteration stops once every update is smaller than this.
pub const UPDATE_TOLERANCE: f64 = 1e-13;
/// Accepted residual `|p(z)|`, relative to the largest coefficient.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const CLUSTER_RADIUS: f64 = 1e-4;
const MULTIPLICITY_TOLERANCE: f64 = 1e-11;

/// Horner evaluation; `coeffs` are ordered highest degree first.
pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients of the derivative, highest degree first.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c * (n - i) as f64)
        .collect()
}

fn max_abs(coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}

/// All complex roots of a polynomial given highest degree first.
///
/// The leading coefficient must be nonzero; the polynomial is normalised to
/// monic before iterating. Exact trailing zero coefficients are deflated as
/// roots at the origin.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty polynomial".into()))?;
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::InvalidParameter("leading coefficient must be nonzero".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("non-finite polynomial coefficient".into()));
    }
    let mut monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let mut roots = Vec::with_capacity(monic.len() - 1);
    while monic.len() > 1 && *monic.last().unwrap() == 0.0 {
        monic.pop();
        roots.push(Complex64::new(0.0, 0.0));
    }
    match monic.len() {
        1 => {}
        2 => roots.push(Complex64::new(-monic[1], 0.0)),
        _ => {
            let mut found = durand_kerner(&monic)?;
            polish_clusters(&monic, &mut found);
            roots.extend(found);
        }
    }
    Ok(roots)
}

fn durand_kerner(monic: &[f64]) -> Result<Vec<Complex64>> {
    let degree = monic.len() - 1;
    let radius = 1.0 + max_abs(&monic[1..]);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / degree as f64))
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut biggest = 0.0_f64;
        for k in 0..degree {
            let zk = z[k];
            let denom = z
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, zj)| acc * (zk - zj));
            let step = if denom.norm() == 0.0 {
                // Coincident iterates: nudge apart.
                Complex64::new(1e-8, 1e-8)
            } else {
                eval(monic, zk) / denom
            };
            z[k] = zk - step;
            biggest = biggest.max(step.norm());
        }
        if !biggest.is_finite() {
            break;
        }
        if biggest < UPDATE_TOLERANCE {
            return Ok(z);
        }
    }

    // Repeated roots stall the update size above the tolerance while the
    // residual is already at rounding level; accept those.
    let scale = max_abs(monic);
    if z.iter()
        .all(|&zk| zk.is_finite() && eval(monic, zk).norm() <= RESIDUAL_TOLERANCE * scale)
    {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            what: "Durand-Kerner root finder",
            iterations: MAX_ITERATIONS,
        })
    }
}

fn polish_clusters(monic: &[f64], roots: &mut [Complex64]) {
    let n = roots.len();
    let mut cluster_of: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            let tol = CLUSTER_RADIUS * roots[i].norm().max(1.0);
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut cluster_of, i), find(&mut cluster_of, j));
                cluster_of[a] = b;
            }
        }
    }
    let scale = max_abs(monic);
    for root_id in 0..n {
        if find(&mut cluster_of, root_id) != root_id {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| find(&mut cluster_of, i) == root_id).collect();
        let k = members.len();
        if k < 2 {
            continue;
        }
        let centroid = members.iter().map(|&i| roots[i]).sum::<Complex64>() / k as f64;

        let mut deriv = monic.to_vec();
        for _ in 0..k - 1 {
            deriv = derivative(&deriv);
        }
        let d_deriv = derivative(&deriv);
        let mut c = centroid;
        for _ in 0..8 {
            let slope = eval(&d_deriv, c);
            if slope.norm() == 0.0 {
                break;
            }
            let step = eval(&deriv, c) / slope;
            c -= step;
            if step.norm() <= f64::EPSILON * c.norm().max(1.0) {
                break;
            }
        }
        if !c.is_finite() || (c - centroid).norm() > CLUSTER_RADIUS {
            continue;
        }

        // Taylor coefficients p^(j)(c)/j! for j < k must all vanish for a k-fold root.
        let mut d = monic.to_vec();
        let mut factorial = 1.0;
        let mut is_multiple = true;
        for j in 0..k {
            if j > 0 {
                d = derivative(&d);
                factorial *= j as f64;
            }
            if eval(&d, c).norm() / factorial > MULTIPLICITY_TOLERANCE * scale {
                is_multiple = false;
                break;
            }
        }
        if is_multiple {
            for &i in &members {
                roots[i] = c;
            }
        }
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_modulus(coeffs: &[f64]) -> f64 {
        polynomial_roots(coeffs)
            .unwrap()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn linear_and_quadratic() {
        assert_eq!(max_modulus(&[1.0, -0.5]), 0.5);
        assert!((max_modulus(&[1.0, 0.0, -0.25]) - 0.5).abs() < 1e-14);
        let r = polynomial_roots(&[1.0, 0.0, 1.0]).unwrap();
        assert!(r.iter().all(|z| (z.norm() - 1.0).abs() < 1e-13 && z.re.abs() < 1e-13));
    }

    #[test]
    fn zero_roots_deflated() {
        let r = polynomial_roots(&[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&Complex64::new(0.0, 0.0)));
        assert!(r.contains(&Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn repeated_roots_recovered_to_working_precision() {
        // (z - 0.3)^2 and (z + 0.7)^3
        let r = polynomial_roots(&[1.0, -0.6, 0.09]).unwrap();
        assert!(r.iter().all(|z| (*z - 0.3).norm() < 1e-14), "{r:?}");
        let r = polynomial_roots(&[1.0, 2.1, 1.47, 0.343]).unwrap();
        assert!(r.iter().all(|z| (*z + 0.7).norm() < 1e-14), "{r:?}");
    }

    #[test]
    fn close_but_distinct_roots_kept_apart() {
        // (z - 0.5)(z - 0.5001)
        let r = polynomial_roots(&[1.0, -1.0001, 0.25005]).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - 0.5).abs() < 1e-10 && (re[1] - 0.5001).abs() < 1e-10, "{re:?}");
    }

    #[test]
    fn non_monic_and_invalid_inputs() {
        assert!((max_modulus(&[2.0, -1.0]) - 0.5).abs() < 1e-15);
        assert!(polynomial_roots(&[]).is_err());
        assert!(polynomial_roots(&[0.0, 1.0]).is_err());
        assert!(polynomial_roots(&[1.0, f64::NAN]).is_err());
        assert!(polynomial_roots(&[3.0]).unwrap().is_empty());
    }

    #[test]
    fn derivative_coefficients() {
        assert_eq!(derivative(&[1.0, 2.0, 3.0, 4.0]), vec![3.0, 4.0, 3.0]);
        assert!(derivative(&[5.0]).is_empty());
    }
}
