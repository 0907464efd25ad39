//! Polynomial roots by Aberth–Ehrlich iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 1000;

/// Relative backward-error bound every returned root must meet.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `p(z)` and `p'(z)` by Horner; `coeffs[k]` multiplies `z^k`.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / Σ |a_k| |z|^k`.
pub fn backward_error(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = horner(coeffs, z);
    let r = z.norm();
    let scale = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All roots of `Σ coeffs[k] z^k`. The constant and leading coefficients must
/// be nonzero.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len().saturating_sub(1);
    match degree {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-coeffs[0] / coeffs[1]]),
        _ => {}
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();

    // Start on a circle of radius |a_0|^{1/d}, the geometric mean of the root
    // moduli, rotated off the real axis.
    let radius = monic[0].norm().powf(1.0 / degree as f64);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (p, dp) = horner(&monic, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(f64::MIN_POSITIVE));
            }
        }
        if max_step < 4.0 * f64::EPSILON {
            break;
        }
    }

    // Aberth stalls at the rounding floor for clustered roots without ever
    // meeting the step criterion; accept when the residuals are small anyway.
    let residual_ok = z
        .iter()
        .all(|&r| r.is_finite() && backward_error(&monic, r) < RESIDUAL_TOL);
    if !residual_ok {
        return Err(Error::RootFinding {
            iterations,
            partial: z,
        });
    }
    Ok(z)
}
