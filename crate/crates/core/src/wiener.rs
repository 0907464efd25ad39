//! Inversion of a nonvanishing Laurent polynomial in a weighted Wiener algebra.
//!
//! Given `f` with no zero on the unit circle and a weight `ω`, [`construct_nu`]
//! builds a weight `ν ≤ ω` whose Gelfand annulus avoids every zero of `f`, and
//! [`invert`] computes `1/f` as an element of `ℓ¹(Z, ν)`.
//!
//! The zero-free annulus around the circle is read off exactly from the zero
//! moduli of `f`: with `m₊` the smallest zero modulus above 1 and `m₋` the
//! largest below 1,
//!
//! ```text
//! r₁ = min(ρ₁(ω), 1 + (1 − ε)(m₊ − 1)),   r₂ = max(ρ₂(ω), 1 − (1 − ε)(1 − m₋)),
//! ```
//!
//! and `ν(n) = r₁ⁿ (n ≥ 0)`, `r₂ⁿ (n ≤ 0)` unless `ρ₂(ω) = ρ₁(ω)`, in which
//! case `ν = ω`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    classify_summability, min_modulus, weighted_norm, Annulus, BeurlingElement, Grid, Summability,
    TailModel,
};
use crate::error::{Error, Result};
use crate::series::{stitched_coefficients, LaurentPolynomial};
use crate::weights::WeightSpec;

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_TRUNC: usize = 64;
pub const DEFAULT_SAMPLES: usize = 4096;

/// Zero moduli closer than this to 1 count as zeros on the circle.
pub const CIRCLE_TOL: f64 = 1e-8;

/// `|f|` below this on the safe annulus is too ill-conditioned to invert.
pub const CONDITIONING_FLOOR: f64 = 1e-10;

/// Window for the `ν ≤ ω` clause.
pub const ORDER_WINDOW: i64 = 128;

/// Sampling circles sit a relative `ALIAS_MARGIN / M` inside the nearest zero,
/// so the aliased tail is damped by about `e^{−ALIAS_MARGIN}`.
const ALIAS_MARGIN: f64 = 36.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuCase {
    /// `ρ₂ = 1 = ρ₁`
    I,
    /// `ρ₂ = 1 < ρ₁`
    Ii,
    /// `ρ₂ < 1 = ρ₁`
    Iii,
    /// `ρ₂ < 1 < ρ₁`
    Iv,
}

impl NuCase {
    fn classify(rho2: f64, rho1: f64) -> Self {
        match (rho2 == 1.0, rho1 == 1.0) {
            (true, true) => Self::I,
            (true, false) => Self::Ii,
            (false, true) => Self::Iii,
            (false, false) => Self::Iv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuConstruction {
    pub nu: WeightSpec,
    pub r1: f64,
    pub r2: f64,
    pub case: NuCase,
    pub epsilon: f64,
    /// `[r₂, r₁]`, free of zeros of `f`.
    pub safe_annulus: Annulus,
    /// Smallest zero modulus above 1, if any.
    pub outer_zero: Option<f64>,
    /// Largest nonzero zero modulus below 1, if any.
    pub inner_zero: Option<f64>,
}

/// Builds `ν` for `f` and `ω`.
pub fn construct_nu(f: &LaurentPolynomial, w: &WeightSpec, epsilon: f64) -> Result<NuConstruction> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Argument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if f.is_zero() {
        return Err(Error::Argument("cannot invert the zero element".into()));
    }
    let radii = f.zero_radii()?;
    if let Some(&m) = radii.iter().find(|m| (**m - 1.0).abs() < CIRCLE_TOL) {
        return Err(Error::VanishesOnCircle { modulus: m });
    }
    let outer_zero = radii.iter().copied().find(|m| *m > 1.0);
    let inner_zero = radii.iter().copied().rfind(|m| *m < 1.0 && *m > 0.0);

    let rho = w.rho_bounds()?;
    let case = NuCase::classify(rho.rho2, rho.rho1);
    let r1 = match outer_zero {
        Some(m) => rho.rho1.min(1.0 + (1.0 - epsilon) * (m - 1.0)),
        None => rho.rho1,
    };
    let r2 = rho
        .rho2
        .max(1.0 - (1.0 - epsilon) * (1.0 - inner_zero.unwrap_or(0.0)));
    let nu = if rho.rho2 == rho.rho1 {
        w.clone()
    } else {
        WeightSpec::two_sided(r1, r2)?
    };
    Ok(NuConstruction {
        nu,
        r1,
        r2,
        case,
        epsilon,
        safe_annulus: Annulus::new(r2, r1)?,
        outer_zero,
        inner_zero,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvertOptions {
    /// Coefficients are computed on `[−trunc, trunc]`.
    pub trunc: usize,
    /// Samples per circle; a power of two.
    pub samples: usize,
}

impl Default for InvertOptions {
    fn default() -> Self {
        Self {
            trunc: DEFAULT_TRUNC,
            samples: DEFAULT_SAMPLES,
        }
    }
}

/// `1/f` on `[−trunc, trunc]` as an element of `ℓ¹(Z, ν)`.
pub fn invert(f: &LaurentPolynomial, nu: &NuConstruction, trunc: usize) -> Result<BeurlingElement> {
    invert_with(
        f,
        nu,
        InvertOptions {
            trunc,
            ..InvertOptions::default()
        },
    )
}

pub fn invert_with(
    f: &LaurentPolynomial,
    nu: &NuConstruction,
    opts: InvertOptions,
) -> Result<BeurlingElement> {
    let (Some(low), Some(high)) = (f.low(), f.high()) else {
        return Err(Error::Argument("cannot invert the zero element".into()));
    };
    if opts.trunc < 1 {
        return Err(Error::Argument("truncation must be >= 1".into()));
    }
    let n = opts.trunc as i64;
    let m = opts.samples;
    if (m as u128) < 4 * opts.trunc as u128 + 2 {
        return Err(Error::Argument(format!(
            "{m} samples per circle cannot resolve [-{n}, {n}]"
        )));
    }

    let floor = min_modulus(f, &nu.safe_annulus, Grid::default())?;
    if floor.value < CONDITIONING_FLOOR {
        return Err(Error::Conditioning(format!(
            "|f| = {:e} at {} on the safe annulus [{}, {}]",
            floor.value, floor.argmin, nu.safe_annulus.inner, nu.safe_annulus.outer
        )));
    }

    // Any circle strictly between the bracketing zeros yields the same Laurent
    // coefficients; reading each side just inside its nearest zero keeps the
    // recovered terms relatively accurate far out.
    let margin = ALIAS_MARGIN / m as f64;
    let outer_radius = match nu.outer_zero {
        Some(mp) => nu.r1.max(mp * (1.0 - margin)),
        None => nu.r1,
    };
    let inner_radius = match nu.inner_zero {
        Some(mm) => nu.r2.min(mm * (1.0 + margin)),
        None => nu.r2,
    };
    let reciprocal = |z: Complex64| match f.evaluate(z) {
        Ok(v) => v.inv(),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let mut coeffs = stitched_coefficients(reciprocal, outer_radius, inner_radius, m, -n, n)?;

    // f = z^low P(z). Without zeros of P inside the disk 1/P is a power series,
    // so 1/f vanishes below −low; without zeros outside it vanishes above −high.
    let lo = if nu.inner_zero.is_none() { -low } else { -n };
    let hi = if nu.outer_zero.is_none() { -high } else { n };
    coeffs = coeffs.truncate(lo, hi);

    let tail = TailModel::GeometricTwoSided {
        outer_rate: nu.outer_zero,
        inner_rate: nu.inner_zero,
    };
    BeurlingElement::new(coeffs, nu.nu.clone(), Some(tail))
}

/// `‖f * c − δ₀‖` in the inverse's own weight.
pub fn residual(f: &LaurentPolynomial, inverse: &BeurlingElement) -> Result<f64> {
    let r = &f.convolve(&inverse.coeffs) - &LaurentPolynomial::one();
    weighted_norm(&r, &inverse.weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clauses {
    /// `1/f` is ν-summable.
    pub a: bool,
    /// `ν` is non-constant iff `ω` is.
    pub b: bool,
    /// `ν ≤ ω` on `|n| ≤ 128`.
    pub c: bool,
}

impl Clauses {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WienerReport {
    pub weight: WeightSpec,
    pub construction: NuConstruction,
    pub trunc: usize,
    pub inverse: BeurlingElement,
    /// Stored ν-norm plus the geometric tail estimate.
    pub norm_bound: Option<f64>,
    pub residual: f64,
    pub summability_nu: Summability,
    pub summability_omega: Summability,
    pub clauses: Clauses,
}

/// Builds `ν`, inverts `f`, and checks the three clauses.
pub fn wiener_report(
    f: &LaurentPolynomial,
    w: &WeightSpec,
    epsilon: f64,
    opts: InvertOptions,
) -> Result<WienerReport> {
    let construction = construct_nu(f, w, epsilon)?;
    let inverse = invert_with(f, &construction, opts)?;
    let summability_nu = classify_summability(&inverse)?;
    let summability_omega = classify_summability(&inverse.reweighted(w.clone())?)?;
    let clauses = Clauses {
        a: matches!(summability_nu, Summability::Convergent { .. }),
        b: construction.nu.is_constant() == w.is_constant(),
        c: construction.nu.pointwise_leq(w, ORDER_WINDOW)?,
    };
    let norm_bound = inverse.tail_bound()?.map(|t| inverse.norm + t);
    Ok(WienerReport {
        weight: w.clone(),
        residual: residual(f, &inverse)?,
        construction,
        trunc: opts.trunc,
        inverse,
        norm_bound,
        summability_nu,
        summability_omega,
        clauses,
    })
}
