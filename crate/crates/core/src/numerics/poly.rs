//! Roots of complex polynomials (Aberth–Ehrlich iteration).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `Σ cₖ zᵏ` and its derivative.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of `Σ cₖ zᵏ` (coefficients in increasing degree), with
/// trailing zero coefficients ignored.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.iter().rposition(|c| c.norm() > 0.0).unwrap_or(0);
    let c = &coeffs[..=deg];
    if deg == 0 {
        return Ok(Vec::new());
    }
    // initial guesses on a circle of the Cauchy-bound radius
    let lead = c[deg].norm();
    let radius = 1.0 + c[..deg].iter().map(|x| x.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    let worst = z.iter().map(|&r| horner(c, r).0.norm()).fold(0.0, f64::max);
    if worst < 1e-10 {
        Ok(z)
    } else {
        Err(Error::NewtonDivergence { z: z[0], residual: worst })
    }
}
