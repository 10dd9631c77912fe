//! Routh–Hurwitz certificate for two-tap schemes on star networks.
//!
//! The bilinear map `z = r(s+1)/(s−1)` sends the disc `|z| < r` to the open
//! left half-plane. For `p(z) = z³ + c₁z² + c₂z + c₃` the transformed
//! numerator is `f₀s³ + f₁s² + f₂s + f₃` with
//!
//! ```text
//! f₀ = r³ + c₁r² + c₂r + c₃      f₁ = 3r³ + c₁r² − c₂r − 3c₃
//! f₂ = 3r³ − c₁r² − c₂r + 3c₃    f₃ = r³ − c₁r² + c₂r − c₃
//! ```
//!
//! and Routh–Hurwitz asks for `fᵢ ≥ 0` and `g = f₁f₂ − f₀f₃ ≥ 0`.

use crate::error::{Error, Result};
use crate::scheme::MemoryScheme;
use crate::stability::char_poly;

/// Values at or above this count as nonnegative.
pub const ROUTH_TOLERANCE: f64 = -1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthRow {
    pub lambda: f64,
    pub f: [f64; 4],
    pub g: f64,
}

impl RouthRow {
    pub fn satisfied(&self) -> bool {
        self.f.iter().all(|&v| v >= ROUTH_TOLERANCE) && self.g >= ROUTH_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthCheck {
    pub satisfied: bool,
    /// Rows for λ = 1 and λ = n, the distinct nonzero star eigenvalues.
    pub rows: [RouthRow; 2],
}

/// Bilinear-transformed coefficients of a monic cubic, see module docs.
pub fn bilinear_cubic(coeffs: &[f64; 4], r: f64) -> RouthRow {
    let [_, c1, c2, c3] = *coeffs;
    let (r2, r3) = (r * r, r * r * r);
    let f = [
        r3 + c1 * r2 + c2 * r + c3,
        3.0 * r3 + c1 * r2 - c2 * r - 3.0 * c3,
        3.0 * r3 - c1 * r2 - c2 * r + 3.0 * c3,
        r3 - c1 * r2 + c2 * r - c3,
    ];
    RouthRow {
        lambda: f64::NAN,
        f,
        g: f[1] * f[2] - f[0] * f[3],
    }
}

/// Checks whether every root for the star spectrum `{1, n}` lies in or on the circle of radius `r`.
pub fn routh_star_check(scheme: &MemoryScheme, n: usize, r: f64) -> Result<RouthCheck> {
    if scheme.depth() != 2 {
        return Err(Error::WrongDepth {
            expected: 2,
            got: scheme.depth(),
        });
    }
    if n < 3 {
        return Err(Error::InvalidSize(format!("star check needs n >= 3, got {n}")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("radius {r} outside (0, 1]")));
    }
    let row = |lambda: f64| {
        let p = char_poly(scheme, lambda);
        let coeffs: [f64; 4] = p.coeffs.try_into().expect("depth-2 scheme gives a cubic");
        RouthRow {
            lambda,
            ..bilinear_cubic(&coeffs, r)
        }
    };
    let rows = [row(1.0), row(n as f64)];
    Ok(RouthCheck {
        satisfied: rows.iter().all(RouthRow::satisfied),
        rows,
    })
}
