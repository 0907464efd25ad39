//! Weighted convolution algebras `ℓ¹(Z, ω)` on the integers.
//!
//! - [`weights`]: weights, their axioms and characteristic radii.
//! - [`series`]: finitely supported Laurent series, circle sampling, zeros.
//! - [`algebra`]: weighted norms, the Gelfand annulus, summability verdicts.
//! - [`wiener`]: the weight `ν` for a nonvanishing `f` and the inverse `1/f`.
//! - [`levy`]: resolvents, the weight `χ` and the holomorphic functional calculus.

pub mod algebra;
pub mod error;
pub mod levy;
mod roots;
pub mod series;
pub mod weights;
pub mod wiener;

pub use algebra::{
    classify_summability, gelfand_annulus, min_modulus, weighted_norm, Annulus, BeurlingElement,
    Grid, MinModulus, Summability, TailModel,
};
pub use error::{Error, Result};
pub use series::{sample_on_circle, CircleSamples, LaurentPolynomial};
pub use weights::{Exactness, RadiusPair, WeightSpec, WeightTable};
pub use wiener::{
    construct_nu, invert, invert_with, wiener_report, InvertOptions, NuCase, NuConstruction,
    WienerReport,
};

pub use levy::{
    build_contour, construct_chi, functional_calculus, levy_report, neumann_radius,
    neumann_resolvent, resolvent, ChiConstruction, Contour, ContourKind, HolomorphicFn,
    LevyOptions, LevyReport,
};
pub use num_complex::Complex64;
pub use series::parse_complex;
