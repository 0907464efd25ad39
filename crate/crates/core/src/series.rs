//! Finitely supported Laurent series `Σ a_n z^n`, sampling on circles, and
//! coefficient recovery by DFT.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::roots;

/// Coefficients below this magnitude are not stored.
pub const ZERO_THRESHOLD: f64 = 1e-300;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A Laurent polynomial in canonical form: no stored zeros, empty map is zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, Complex64>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit `δ₀`.
    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(n: i64, c: Complex64) -> Self {
        Self::from_terms([(n, c)])
    }

    /// Builds from `(index, coefficient)` pairs, summing repeated indices.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (n, c) in terms {
            *map.entry(n).or_insert(ZERO) += c;
        }
        map.retain(|_, c: &mut Complex64| c.norm() >= ZERO_THRESHOLD);
        Self { terms: map }
    }

    pub fn from_real(terms: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self::from_terms(terms.into_iter().map(|(n, c)| (n, Complex64::new(c, 0.0))))
    }

    /// `dense[k]` is the coefficient of `z^{low + k}`.
    pub fn from_dense(low: i64, dense: &[Complex64]) -> Self {
        Self::from_terms(dense.iter().enumerate().map(|(k, c)| (low + k as i64, *c)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn low(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn high(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.terms.get(&n).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, Complex64)> + '_ {
        self.terms.iter().map(|(n, c)| (*n, *c))
    }

    /// Coefficients on `lo..=hi`, zeros included.
    pub fn dense(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        (lo..=hi).map(|n| self.coeff(n)).collect()
    }

    pub fn truncate(&self, lo: i64, hi: i64) -> Self {
        Self {
            terms: self.terms.range(lo..=hi).map(|(n, c)| (*n, *c)).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max_n |a_n − b_n|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs_coeff()
    }

    /// `Σ a_n z^n` over the support.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let (Some(low), Some(high)) = (self.low(), self.high()) else {
            return Ok(ZERO);
        };
        if z == ZERO {
            if low < 0 {
                return Err(Error::Singular(format!(
                    "evaluation at z = 0 with support down to z^{low}"
                )));
            }
            return Ok(self.coeff(0));
        }
        let mut acc = ZERO;
        for n in (low..=high).rev() {
            acc = acc * z + self.coeff(n);
        }
        Ok(acc * z.powi(low as i32))
    }

    /// `(a * b)_n = Σ_k a_k b_{n−k}`.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                *out.entry(m + n).or_insert(ZERO) += a * b;
            }
        }
        out.retain(|_, c| c.norm() >= ZERO_THRESHOLD);
        Self { terms: out }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(n, c)| (*n, c * s)))
    }

    /// The factor `z^{low}` and the polynomial `P(z) = z^{−low} f(z)` as
    /// ascending coefficients; `P(0) ≠ 0`.
    fn shifted_polynomial(&self) -> Option<(i64, Vec<Complex64>)> {
        let (low, high) = (self.low()?, self.high()?);
        Some((low, self.dense(low, high)))
    }

    /// All zeros of `f` in `C \ {0}` plus `low` copies of `0` when `low > 0`.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        let Some((low, poly)) = self.shifted_polynomial() else {
            return Err(Error::Argument(
                "the zero element has no isolated zeros".into(),
            ));
        };
        let mut zs = vec![ZERO; low.max(0) as usize];
        zs.extend(roots::roots(&poly)?);
        Ok(zs)
    }

    /// Moduli of the zeros of `z^{−low} f(z)`, ascending, with the shift factor
    /// contributing modulus 0 when `low > 0`.
    pub fn zero_radii(&self) -> Result<Vec<f64>> {
        let mut radii: Vec<f64> = self.zeros()?.iter().map(|z| z.norm()).collect();
        radii.sort_by(f64::total_cmp);
        Ok(radii)
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(self.terms().chain(rhs.terms().map(|(n, c)| (n, -c))))
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        self.convolve(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    n: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TermsFile {
    terms: Vec<Term>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TermsFile {
            terms: self
                .terms()
                .map(|(n, c)| Term {
                    n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = TermsFile::deserialize(deserializer)?;
        let mut seen = std::collections::BTreeSet::new();
        for t in &file.terms {
            if !seen.insert(t.n) {
                return Err(serde::de::Error::custom(format!(
                    "duplicate coefficient index {}",
                    t.n
                )));
            }
        }
        Ok(Self::from_terms(
            file.terms
                .into_iter()
                .map(|t| (t.n, Complex64::new(t.re, t.im))),
        ))
    }
}

/// Values on `radius·e^{2πik/M}`, `k = 0..M`, `M` a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleSamples {
    pub radius: f64,
    pub values: Vec<Complex64>,
}

fn check_sample_count(m: usize) -> Result<()> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Argument(format!(
            "sample count must be a power of two >= 2, got {m}"
        )));
    }
    Ok(())
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Argument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    Ok(())
}

impl CircleSamples {
    pub fn nodes(radius: f64, m: usize) -> impl Iterator<Item = Complex64> {
        (0..m).map(move |k| {
            Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / m as f64)
        })
    }

    /// Samples an arbitrary function on the circle.
    pub fn from_fn(
        radius: f64,
        m: usize,
        mut f: impl FnMut(Complex64) -> Complex64,
    ) -> Result<Self> {
        check_sample_count(m)?;
        check_radius(radius)?;
        Ok(Self {
            radius,
            values: Self::nodes(radius, m).map(&mut f).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c_n = DFT_n(values) / (M r^n)` for `n_min ≤ n ≤ n_max`.
    ///
    /// Exact for Laurent polynomials whose support fits in the window; for
    /// analytic functions the error is the aliased tail `Σ_{k≠0} c_{n+kM} r^{kM}`.
    pub fn coefficients(&self, n_min: i64, n_max: i64) -> Result<LaurentPolynomial> {
        let m = self.values.len();
        check_sample_count(m)?;
        if n_max < n_min {
            return Err(Error::Argument(format!(
                "empty index range [{n_min}, {n_max}]"
            )));
        }
        if (n_max - n_min) as u128 >= m as u128 {
            return Err(Error::Argument(format!(
                "index window [{n_min}, {n_max}] aliases with only {m} samples"
            )));
        }
        let mut buffer = self.values.clone();
        FftPlanner::new().plan_fft_forward(m).process(&mut buffer);
        let scale = m as f64;
        Ok(LaurentPolynomial::from_terms((n_min..=n_max).map(|n| {
            let bin = n.rem_euclid(m as i64) as usize;
            (n, buffer[bin] / (scale * self.radius.powi(n as i32)))
        })))
    }
}

/// Samples `a` at `M` equispaced points of `|z| = radius`.
pub fn sample_on_circle(a: &LaurentPolynomial, radius: f64, m: usize) -> Result<CircleSamples> {
    check_sample_count(m)?;
    check_radius(radius)?;
    if let (Some(lo), Some(hi)) = (a.low(), a.high()) {
        let needed = 2 * (hi - lo) as u128 + 2;
        if (m as u128) < needed {
            return Err(Error::Argument(format!(
                "{m} samples cannot resolve support [{lo}, {hi}] (need >= {needed})"
            )));
        }
    }
    CircleSamples::from_fn(radius, m, |z| {
        a.evaluate(z).expect("z is nonzero on the circle")
    })
}

/// Laurent coefficients on `[n_min, n_max]` of a function analytic on an
/// annulus containing both radii: `n ≥ 0` from the outer circle, `n < 0` from
/// the inner one, so each side is read where its terms decay fastest.
pub fn stitched_coefficients(
    mut g: impl FnMut(Complex64) -> Complex64,
    outer_radius: f64,
    inner_radius: f64,
    m: usize,
    n_min: i64,
    n_max: i64,
) -> Result<LaurentPolynomial> {
    if inner_radius > outer_radius {
        return Err(Error::Argument(format!(
            "inner radius {inner_radius} exceeds outer radius {outer_radius}"
        )));
    }
    let mut out = LaurentPolynomial::zero();
    if n_max >= 0 {
        let samples = CircleSamples::from_fn(outer_radius, m, &mut g)?;
        out = &out + &samples.coefficients(n_min.max(0), n_max)?;
    }
    if n_min < 0 {
        let samples = CircleSamples::from_fn(inner_radius, m, &mut g)?;
        out = &out + &samples.coefficients(n_min, n_max.min(-1))?;
    }
    Ok(out)
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (`i` or `j`; `i` alone means `1i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad complex number `{s}`"));
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    // The split is the last sign that is neither leading nor an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (num(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => num(x)?,
    };
    Ok(Complex64::new(re, im))
}
