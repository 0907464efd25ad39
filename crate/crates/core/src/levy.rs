//! Resolvents, the weight `χ`, and the holomorphic functional calculus
//!
//! ```text
//! φ(f) = (1/2πi) ∮_C φ(λ) R_λ dλ,   R_λ = (λδ₀ − f)^{−1},
//! ```
//!
//! where `C` is a positively oriented contour enclosing the range `K` of `f` on
//! the unit circle. Each quadrature node gets its own weight `η` from
//! [`construct_nu`] applied to `λδ₀ − f`; `χ` takes the smallest outer radius
//! and the largest inner radius over all nodes.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{classify_summability, BeurlingElement, Summability, TailModel};
use crate::error::{Error, Result};
use crate::roots;
use crate::series::{parse_complex, LaurentPolynomial};
use crate::weights::WeightSpec;
use crate::wiener::{
    construct_nu, invert_with, InvertOptions, NuConstruction, DEFAULT_EPSILON, DEFAULT_SAMPLES,
    DEFAULT_TRUNC, ORDER_WINDOW,
};

pub const DEFAULT_NODES: usize = 256;

/// Points of `K = f(Γ)` used for geometry checks.
pub const RANGE_SAMPLES: usize = 1024;

/// Grid for comparing `φ(f)` with `φ ∘ f` on the circle.
pub const POINTWISE_SAMPLES: usize = 256;

/// Allowed change between the full and the half-resolution rule, relative to
/// `max(1, max |c_n|)`.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Terms kept in the Neumann expansion of a nearby resolvent.
pub const NEUMANN_TERMS: usize = 60;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn complex_literal(c: Complex64) -> String {
    format!("{}{:+}i", c.re, c.im)
}

/// A function holomorphic off a finite set of poles.
#[derive(Clone, Debug, PartialEq)]
pub enum HolomorphicFn {
    Identity,
    Reciprocal,
    Square,
    Exp,
    /// `P(λ)/Q(λ)` with ascending coefficients.
    Rational {
        num: Vec<Complex64>,
        den: Vec<Complex64>,
    },
}

fn polyval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

impl HolomorphicFn {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Identity => z,
            Self::Reciprocal => z.inv(),
            Self::Square => z * z,
            Self::Exp => z.exp(),
            Self::Rational { num, den } => polyval(num, z) / polyval(den, z),
        }
    }

    /// Points where the function fails to be holomorphic.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        match self {
            Self::Identity | Self::Square | Self::Exp => Ok(Vec::new()),
            Self::Reciprocal => Ok(vec![Complex64::new(0.0, 0.0)]),
            Self::Rational { den, .. } => {
                let hi = den.iter().rposition(|c| c.norm() > 0.0).ok_or_else(|| {
                    Error::Argument("rational function with zero denominator".into())
                })?;
                let lo = den.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
                let mut poles = vec![Complex64::new(0.0, 0.0); lo];
                poles.extend(roots::roots(&den[lo..=hi])?);
                Ok(poles)
            }
        }
    }

    /// Human-readable domain of holomorphy.
    pub fn declared_domain(&self) -> String {
        match self {
            Self::Identity | Self::Square | Self::Exp => "C".into(),
            Self::Reciprocal => "C \\ {0}".into(),
            Self::Rational { .. } => "C \\ {zeros of Q}".into(),
        }
    }
}

impl fmt::Display for HolomorphicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("id"),
            Self::Reciprocal => f.write_str("recip"),
            Self::Square => f.write_str("square"),
            Self::Exp => f.write_str("exp"),
            Self::Rational { num, den } => {
                let join = |v: &[Complex64]| {
                    v.iter()
                        .map(|c| complex_literal(*c))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                write!(f, "rational:{}:{}", join(num), join(den))
            }
        }
    }
}

impl FromStr for HolomorphicFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "id" | "identity" => return Ok(Self::Identity),
            "recip" | "reciprocal" => return Ok(Self::Reciprocal),
            "square" => return Ok(Self::Square),
            "exp" => return Ok(Self::Exp),
            _ => {}
        }
        let parts: Vec<&str> = s.trim().split(':').collect();
        let ["rational", p, q] = parts.as_slice() else {
            return Err(Error::Parse(format!(
                "unknown function `{s}` (expected id, recip, square, exp or rational:<P>:<Q>)"
            )));
        };
        let list =
            |x: &str| -> Result<Vec<Complex64>> { x.split(',').map(parse_complex).collect() };
        let (num, den) = (list(p)?, list(q)?);
        if den.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::Parse(
                "rational function with zero denominator".into(),
            ));
        }
        Ok(Self::Rational { num, den })
    }
}

impl Serialize for HolomorphicFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HolomorphicFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ContourKind {
    Circle {
        center: Complex64,
        radius: f64,
    },
    /// Closed polygon; the last vertex connects back to the first.
    Polyline {
        vertices: Vec<Complex64>,
    },
}

/// A quadrature node: `∮ g(λ) dλ ≈ Σ weight · g(point)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourNode {
    pub point: Complex64,
    pub weight: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContourRepr", into = "ContourRepr")]
pub struct Contour {
    pub kind: ContourKind,
    pub q: usize,
    pub nodes: Vec<ContourNode>,
}

#[derive(Serialize, Deserialize)]
struct ContourRepr {
    #[serde(flatten)]
    kind: ContourKind,
    q: usize,
}

impl From<Contour> for ContourRepr {
    fn from(c: Contour) -> Self {
        Self {
            kind: c.kind,
            q: c.q,
        }
    }
}

impl TryFrom<ContourRepr> for Contour {
    type Error = Error;
    fn try_from(r: ContourRepr) -> Result<Self> {
        Contour::new(r.kind, r.q)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

fn signed_area(vertices: &[Complex64]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|k| {
            let (a, b) = (vertices[k], vertices[(k + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
        / 2.0
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let t = if d.norm_sqr() == 0.0 {
        0.0
    } else {
        (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
    };
    (a + d * t - p).norm()
}

impl Contour {
    pub fn new(kind: ContourKind, q: usize) -> Result<Self> {
        match kind {
            ContourKind::Circle { center, radius } => Self::circle(center, radius, q),
            ContourKind::Polyline { vertices } => Self::polyline(vertices, q),
        }
    }

    /// Trapezoid rule on `center + radius·e^{iθ}` with `q` nodes.
    pub fn circle(center: Complex64, radius: f64, q: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::Argument(format!(
                "bad circle: center {center}, radius {radius}"
            )));
        }
        if q < 4 || !q.is_multiple_of(2) {
            return Err(Error::Argument(format!(
                "node count must be even and >= 4, got {q}"
            )));
        }
        let nodes = (0..q)
            .map(|k| {
                let e = Complex64::from_polar(1.0, TAU * k as f64 / q as f64);
                ContourNode {
                    point: center + e * radius,
                    weight: I * e * radius * (TAU / q as f64),
                }
            })
            .collect();
        Ok(Self {
            kind: ContourKind::Circle { center, radius },
            q,
            nodes,
        })
    }

    /// Composite Gauss–Legendre on each edge, about `q` nodes in total. The
    /// vertex order is reversed if needed to make the orientation positive.
    pub fn polyline(mut vertices: Vec<Complex64>, q: usize) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Argument(
                "a polyline contour needs at least 3 vertices".into(),
            ));
        }
        let area = signed_area(&vertices);
        if area == 0.0 || !area.is_finite() {
            return Err(Error::Geometry("degenerate polyline".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let edges = vertices.len();
        let order = q.div_ceil(edges).max(2);
        let rule = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * edges);
        for k in 0..edges {
            let (a, b) = (vertices[k], vertices[(k + 1) % edges]);
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            nodes.extend(rule.iter().map(|&(x, w)| ContourNode {
                point: mid + half * x,
                weight: half * w,
            }));
        }
        Ok(Self {
            kind: ContourKind::Polyline { vertices },
            q: order * edges,
            nodes,
        })
    }

    /// The same curve at half resolution, for convergence checks.
    pub fn coarse(&self) -> Result<Self> {
        match &self.kind {
            ContourKind::Circle { .. } => Ok(Self {
                kind: self.kind.clone(),
                q: self.q / 2,
                nodes: self
                    .nodes
                    .iter()
                    .step_by(2)
                    .map(|n| ContourNode {
                        point: n.point,
                        weight: n.weight * 2.0,
                    })
                    .collect(),
            }),
            ContourKind::Polyline { vertices } => Self::polyline(vertices.clone(), self.q / 2),
        }
    }

    pub fn winding_number(&self, p: Complex64) -> i64 {
        match &self.kind {
            ContourKind::Circle { center, radius } => i64::from((p - center).norm() < *radius),
            ContourKind::Polyline { vertices } => {
                let n = vertices.len();
                let total: f64 = (0..n)
                    .map(|k| ((vertices[(k + 1) % n] - p) / (vertices[k] - p)).arg())
                    .sum();
                (total / TAU).round() as i64
            }
        }
    }

    pub fn distance(&self, p: Complex64) -> f64 {
        match &self.kind {
            ContourKind::Circle { center, radius } => ((p - center).norm() - radius).abs(),
            ContourKind::Polyline { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|k| segment_distance(vertices[k], vertices[(k + 1) % n], p))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Checks that the contour winds once around every point of `range`, stays
    /// at least `clearance` away from it, and leaves `poles` outside.
    pub fn check_encloses(
        &self,
        range: &[Complex64],
        clearance: f64,
        poles: &[Complex64],
    ) -> Result<()> {
        for &w in range {
            if self.winding_number(w) != 1 {
                return Err(Error::Geometry(format!(
                    "the contour does not enclose f = {w}"
                )));
            }
            let d = self.distance(w);
            if d < clearance {
                return Err(Error::Geometry(format!(
                    "the contour passes within {d:e} of f = {w} (clearance {clearance:e})"
                )));
            }
        }
        for &p in poles {
            if self.winding_number(p) != 0 || self.distance(p) == 0.0 {
                return Err(Error::Geometry(format!(
                    "the contour encloses or meets the pole {p}"
                )));
            }
        }
        Ok(())
    }
}

/// `f(e^{2πik/count})`, `k = 0..count`.
pub fn range_samples(f: &LaurentPolynomial, count: usize) -> Result<Vec<Complex64>> {
    (0..count)
        .map(|k| f.evaluate(Complex64::from_polar(1.0, TAU * k as f64 / count as f64)))
        .collect()
}

fn diameter(points: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// A circle around the range of `f`, at distance `clearance` from it
/// (default `0.1·diam(K)`), with `q` nodes.
///
/// With the default clearance the circle is pulled in to pass midway between
/// `K` and any pole that would otherwise fall inside it.
pub fn build_contour(
    f: &LaurentPolynomial,
    phi: &HolomorphicFn,
    q: usize,
    clearance: Option<f64>,
) -> Result<Contour> {
    let range = range_samples(f, RANGE_SAMPLES)?;
    let center = range.iter().sum::<Complex64>() / range.len() as f64;
    let spread = range
        .iter()
        .map(|w| (w - center).norm())
        .fold(0.0, f64::max);
    let floor = 1e-3 * center.norm().max(1.0);
    let mut gap = match clearance {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => {
            return Err(Error::Argument(format!(
                "clearance must be positive, got {c}"
            )))
        }
        None => (0.1 * diameter(&range)).max(floor),
    };
    let poles = phi.poles()?;
    for p in &poles {
        let d = (p - center).norm();
        if d <= spread {
            return Err(Error::Geometry(format!(
                "the pole {p} lies within the range of f; no circle in {} encloses it",
                phi.declared_domain()
            )));
        }
        if d <= spread + gap {
            if clearance.is_some() {
                return Err(Error::Geometry(format!(
                    "the pole {p} lies within the requested clearance {gap} of the range"
                )));
            }
            gap = (d - spread) / 2.0;
        }
    }
    let contour = Contour::circle(center, spread + gap, q)?;
    contour.check_encloses(&range, gap * (1.0 - 1e-9), &poles)?;
    Ok(contour)
}

/// Parameters shared by every node resolvent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyOptions {
    pub epsilon: f64,
    pub trunc: usize,
    pub samples: usize,
}

impl Default for LevyOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            trunc: DEFAULT_TRUNC,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl LevyOptions {
    fn invert(&self) -> InvertOptions {
        InvertOptions {
            trunc: self.trunc,
            samples: self.samples,
        }
    }
}

fn shifted(f: &LaurentPolynomial, lambda: Complex64) -> LaurentPolynomial {
    &LaurentPolynomial::constant(lambda) - f
}

/// `R_λ` together with the weight `η` it was computed under.
pub fn resolvent_with(
    f: &LaurentPolynomial,
    lambda: Complex64,
    w: &WeightSpec,
    opts: LevyOptions,
) -> Result<(NuConstruction, BeurlingElement)> {
    let g = shifted(f, lambda);
    if g.is_zero() {
        return Err(Error::Singular(format!("lambda = {lambda} equals f")));
    }
    let eta = construct_nu(&g, w, opts.epsilon).map_err(|e| match e {
        Error::VanishesOnCircle { modulus } => Error::Singular(format!(
            "lambda = {lambda} lies on the range of f (zero of modulus {modulus})"
        )),
        e => e,
    })?;
    let r = invert_with(&g, &eta, opts.invert())?;
    Ok((eta, r))
}

/// `R_λ = (λδ₀ − f)^{−1}` in `ℓ¹(Z, η)`, `η` built for `λδ₀ − f`.
pub fn resolvent(
    f: &LaurentPolynomial,
    lambda: Complex64,
    w: &WeightSpec,
    epsilon: f64,
    trunc: usize,
) -> Result<BeurlingElement> {
    let opts = LevyOptions {
        epsilon,
        trunc,
        ..LevyOptions::default()
    };
    Ok(resolvent_with(f, lambda, w, opts)?.1)
}

/// `1/‖R_μ‖_η`: the Neumann expansion about `μ` converges for `|λ − μ|` below it.
pub fn neumann_radius(
    f: &LaurentPolynomial,
    mu: Complex64,
    w: &WeightSpec,
    epsilon: f64,
    trunc: usize,
) -> Result<f64> {
    let r = resolvent(f, mu, w, epsilon, trunc)?;
    Ok(1.0 / r.norm_bound()?)
}

/// `R_{μ+δ} ≈ Σ_{k<terms} (−δ)^k R_μ^{k+1}`, each power truncated to
/// `[−trunc, trunc]`.
pub fn neumann_resolvent(
    r_mu: &LaurentPolynomial,
    delta: Complex64,
    terms: usize,
    trunc: usize,
) -> LaurentPolynomial {
    let n = trunc as i64;
    let mut power = r_mu.truncate(-n, n);
    let mut acc = power.clone();
    for _ in 1..terms {
        power = power.convolve(r_mu).truncate(-n, n).scale(-delta);
        acc = &acc + &power;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSummary {
    pub lambda: Complex64,
    /// `‖R_λ‖_η`, stored part plus tail estimate.
    pub resolvent_norm: f64,
    pub eta_r1: f64,
    pub eta_r2: f64,
    pub outer_zero: Option<f64>,
    pub inner_zero: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiConstruction {
    pub chi: WeightSpec,
    pub r1: f64,
    pub r2: f64,
    pub weight: WeightSpec,
    pub options: LevyOptions,
    pub nodes: Vec<NodeSummary>,
    #[serde(skip)]
    pub resolvents: Vec<BeurlingElement>,
}

/// Computes `R_λ` and `η` at every node and combines the radii into `χ`.
pub fn construct_chi(
    f: &LaurentPolynomial,
    contour: &Contour,
    w: &WeightSpec,
    opts: LevyOptions,
) -> Result<ChiConstruction> {
    let mut nodes = Vec::with_capacity(contour.nodes.len());
    let mut resolvents = Vec::with_capacity(contour.nodes.len());
    let (mut r1, mut r2) = (f64::INFINITY, f64::NEG_INFINITY);
    for (index, node) in contour.nodes.iter().enumerate() {
        let lambda = node.point;
        let (eta, r) = resolvent_with(f, lambda, w, opts).map_err(|e| Error::Node {
            index,
            lambda,
            source: Box::new(e),
        })?;
        r1 = r1.min(eta.r1);
        r2 = r2.max(eta.r2);
        nodes.push(NodeSummary {
            lambda,
            resolvent_norm: r.norm_bound()?,
            eta_r1: eta.r1,
            eta_r2: eta.r2,
            outer_zero: eta.outer_zero,
            inner_zero: eta.inner_zero,
        });
        resolvents.push(r);
    }
    if nodes.is_empty() {
        return Err(Error::Argument("contour has no nodes".into()));
    }
    let rho = w.rho_bounds()?;
    let chi = if rho.rho2 == rho.rho1 {
        w.clone()
    } else {
        WeightSpec::two_sided(r1, r2)?
    };
    Ok(ChiConstruction {
        chi,
        r1,
        r2,
        weight: w.clone(),
        options: opts,
        nodes,
        resolvents,
    })
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// `(1/2πi) Σ_k w_k φ(λ_k) R_k` on `[−trunc, trunc]`.
fn contour_sum(
    phi: &HolomorphicFn,
    nodes: &[ContourNode],
    resolvents: &[&LaurentPolynomial],
    trunc: usize,
) -> LaurentPolynomial {
    let n = trunc as i64;
    let scaled: Vec<Complex64> = nodes
        .iter()
        .map(|node| node.weight * phi.eval(node.point) / (TAU * I))
        .collect();
    let dense: Vec<Complex64> = (-n..=n)
        .map(|j| {
            let terms: Vec<Complex64> = scaled
                .iter()
                .zip(resolvents)
                .map(|(s, r)| s * r.coeff(j))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    LaurentPolynomial::from_dense(-n, &dense)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calculus {
    pub element: BeurlingElement,
    /// `max_n |c_n(Q) − c_n(Q/2)|`.
    pub quadrature_delta: f64,
}

/// `φ(f)` with the half-resolution comparison; fails with an accuracy error
/// when the two rules disagree by more than [`QUADRATURE_TOL`].
pub fn functional_calculus_checked(
    f: &LaurentPolynomial,
    phi: &HolomorphicFn,
    contour: &Contour,
    chi: &ChiConstruction,
) -> Result<Calculus> {
    if chi.resolvents.len() != contour.nodes.len() {
        return Err(Error::Argument(format!(
            "the weight construction has {} nodes but the contour has {}",
            chi.resolvents.len(),
            contour.nodes.len()
        )));
    }
    let trunc = chi.options.trunc;
    for (index, node) in contour.nodes.iter().enumerate() {
        let v = phi.eval(node.point);
        if !v.is_finite() {
            return Err(Error::Geometry(format!(
                "phi is not finite at contour node {index} (lambda = {})",
                node.point
            )));
        }
    }
    let refs: Vec<&LaurentPolynomial> = chi.resolvents.iter().map(|r| &r.coeffs).collect();
    let fine = contour_sum(phi, &contour.nodes, &refs, trunc);

    let coarse = contour.coarse()?;
    let coarse_sum = match contour.kind {
        ContourKind::Circle { .. } => {
            let even: Vec<&LaurentPolynomial> = refs.iter().step_by(2).copied().collect();
            contour_sum(phi, &coarse.nodes, &even, trunc)
        }
        ContourKind::Polyline { .. } => {
            let rs = coarse
                .nodes
                .iter()
                .map(|node| {
                    Ok(resolvent_with(f, node.point, &chi.weight, chi.options)?
                        .1
                        .coeffs)
                })
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&LaurentPolynomial> = rs.iter().collect();
            contour_sum(phi, &coarse.nodes, &refs, trunc)
        }
    };
    let quadrature_delta = fine.max_abs_diff(&coarse_sum);
    let scale = fine.max_abs_coeff().max(1.0);
    if quadrature_delta.is_nan() || quadrature_delta > QUADRATURE_TOL * scale {
        return Err(Error::Accuracy(format!(
            "halving the node count moves a coefficient by {quadrature_delta:e}"
        )));
    }

    let outer_rate = chi
        .nodes
        .iter()
        .filter_map(|n| n.outer_zero)
        .reduce(f64::min);
    let inner_rate = chi
        .nodes
        .iter()
        .filter_map(|n| n.inner_zero)
        .reduce(f64::max);
    let tail = TailModel::GeometricTwoSided {
        outer_rate,
        inner_rate,
    };
    Ok(Calculus {
        element: BeurlingElement::new(fine, chi.chi.clone(), Some(tail))?,
        quadrature_delta,
    })
}

/// `φ(f) = (1/2πi) ∮_C φ(λ) R_λ dλ` as an element of `ℓ¹(Z, χ)`.
pub fn functional_calculus(
    f: &LaurentPolynomial,
    phi: &HolomorphicFn,
    contour: &Contour,
    chi: &ChiConstruction,
) -> Result<BeurlingElement> {
    Ok(functional_calculus_checked(f, phi, contour, chi)?.element)
}

/// `max_t |φ(f)(e^{it}) − φ(f(e^{it}))|` over `samples` equispaced `t`.
pub fn pointwise_error(
    f: &LaurentPolynomial,
    phi: &HolomorphicFn,
    result: &LaurentPolynomial,
    samples: usize,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..samples {
        let z = Complex64::from_polar(1.0, TAU * k as f64 / samples as f64);
        let d = (result.evaluate(z)? - phi.eval(f.evaluate(z)?)).norm();
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyClauses {
    /// `φ(f)` is χ-summable.
    pub a: bool,
    /// `χ` is non-constant iff `ω` is.
    pub b: bool,
    /// `χ ≤ ω` on `|n| ≤ 128`.
    pub c: bool,
}

impl LevyClauses {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyReport {
    pub phi: HolomorphicFn,
    pub contour: Contour,
    pub construction: ChiConstruction,
    pub result: BeurlingElement,
    pub norm_bound: Option<f64>,
    pub quadrature_delta: f64,
    pub pointwise_error: f64,
    pub summability_chi: Summability,
    pub clauses: LevyClauses,
}

/// Builds `χ`, evaluates `φ(f)` and checks the three clauses.
pub fn levy_report(
    f: &LaurentPolynomial,
    phi: &HolomorphicFn,
    contour: &Contour,
    w: &WeightSpec,
    opts: LevyOptions,
) -> Result<LevyReport> {
    let range = range_samples(f, RANGE_SAMPLES)?;
    contour.check_encloses(&range, 0.0, &phi.poles()?)?;
    let construction = construct_chi(f, contour, w, opts)?;
    let calc = functional_calculus_checked(f, phi, contour, &construction)?;
    let summability_chi = classify_summability(&calc.element)?;
    let clauses = LevyClauses {
        a: matches!(summability_chi, Summability::Convergent { .. }),
        b: construction.chi.is_constant() == w.is_constant(),
        c: construction.chi.pointwise_leq(w, ORDER_WINDOW)?,
    };
    Ok(LevyReport {
        phi: phi.clone(),
        contour: contour.clone(),
        norm_bound: calc.element.tail_bound()?.map(|t| calc.element.norm + t),
        pointwise_error: pointwise_error(f, phi, &calc.element.coeffs, POINTWISE_SAMPLES)?,
        quadrature_delta: calc.quadrature_delta,
        result: calc.element,
        construction,
        summability_chi,
        clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiener::invert;

    fn lp(terms: &[(i64, f64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_real(terms.iter().copied())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn calculus(f: &LaurentPolynomial, phi: HolomorphicFn, w: &WeightSpec) -> LaurentPolynomial {
        let contour = build_contour(f, &phi, DEFAULT_NODES, None).unwrap();
        let chi = construct_chi(f, &contour, w, LevyOptions::default()).unwrap();
        functional_calculus(f, &phi, &contour, &chi).unwrap().coeffs
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for order in [1, 2, 5, 16, 33] {
            let rule = gauss_legendre(order);
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-13, "order {order}");
            let deg = 2 * order - 1;
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            let got: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((got - exact).abs() < 1e-13, "order {order}");
            let even = deg - 1;
            let got: f64 = rule.iter().map(|(x, w)| w * x.powi(even as i32)).sum();
            assert!((got - 2.0 / (even as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn circle_weights_integrate_cauchy_kernel() {
        let k = Contour::circle(c(1.0, -1.0), 0.5, 64).unwrap();
        let a = c(1.1, -0.9);
        let s: Complex64 = k.nodes.iter().map(|n| n.weight / (n.point - a)).sum();
        assert!((s - TAU * I).norm() < 1e-13);
        let coarse = k.coarse().unwrap();
        assert_eq!(coarse.nodes.len(), 32);
    }

    #[test]
    fn polyline_orientation_and_winding() {
        let square = vec![c(-1.0, -1.0), c(-1.0, 1.0), c(1.0, 1.0), c(1.0, -1.0)];
        let k = Contour::polyline(square, 64).unwrap();
        assert_eq!(k.winding_number(c(0.2, 0.3)), 1);
        assert_eq!(k.winding_number(c(3.0, 0.0)), 0);
        assert!((k.distance(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let s: Complex64 = k.nodes.iter().map(|n| n.weight / n.point).sum();
        assert!((s - TAU * I).norm() < 1e-10);
    }

    #[test]
    fn contour_for_shifted_circle() {
        let k = build_contour(&lp(&[(0, 2.0), (1, 1.0)]), &HolomorphicFn::Exp, 256, None).unwrap();
        let ContourKind::Circle { center, radius } = k.kind else {
            panic!()
        };
        assert!((center - c(2.0, 0.0)).norm() < 1e-12);
        assert!((radius - 1.2).abs() < 1e-9);
        assert_eq!(k.nodes.len(), 256);
    }

    #[test]
    fn contour_for_constant_and_identity() {
        let k = build_contour(&lp(&[(0, 3.0)]), &HolomorphicFn::Square, 64, None).unwrap();
        let ContourKind::Circle { center, radius } = k.kind else {
            panic!()
        };
        assert!((center - c(3.0, 0.0)).norm() < 1e-15);
        assert!(radius > 0.0 && radius <= 3e-3 + 1e-15);

        let k = build_contour(&lp(&[(1, 1.0)]), &HolomorphicFn::Square, 64, None).unwrap();
        let ContourKind::Circle { center, radius } = k.kind else {
            panic!()
        };
        assert!(center.norm() < 1e-12);
        assert!((radius - 1.2).abs() < 1e-9);
    }

    #[test]
    fn contour_avoids_or_rejects_poles() {
        let phi = HolomorphicFn::Reciprocal;
        // K is |w - 1.15| = 1; the pole 0 is 0.15 from K, inside the default band.
        let f = lp(&[(0, 1.15), (1, 1.0)]);
        let k = build_contour(&f, &phi, 64, None).unwrap();
        let ContourKind::Circle { radius, .. } = k.kind else {
            panic!()
        };
        assert!((radius - 1.075).abs() < 1e-9);
        assert!(matches!(
            build_contour(&f, &phi, 64, Some(0.3)),
            Err(Error::Geometry(_))
        ));
        // K is the unit circle around the pole.
        assert!(matches!(
            build_contour(&lp(&[(1, 1.0)]), &phi, 64, None),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn resolvent_examples() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        let r = resolvent(&f, c(0.0, 0.0), &WeightSpec::Const, 0.1, 64).unwrap();
        for n in 0..=40 {
            let expect = -(-1.0f64).powi(n) / 2f64.powi(n + 1);
            assert!((r.coeffs.coeff(n as i64) - c(expect, 0.0)).norm() < 1e-14);
        }
        assert_eq!(r.coeffs.low(), Some(0));

        let r = resolvent(&f, c(100.0, 0.0), &WeightSpec::Const, 0.1, 64).unwrap();
        for n in 0..=10 {
            let expect = 98f64.powi(-(n + 1));
            assert!((r.coeffs.coeff(n as i64).re - expect).abs() <= 1e-14 * expect);
        }

        let r = resolvent(&lp(&[(1, 1.0)]), c(2.0, 0.0), &WeightSpec::Const, 0.1, 64).unwrap();
        for n in 0..=40 {
            assert!((r.coeffs.coeff(n as i64).re / 2f64.powi(-(n + 1)) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn resolvent_on_range_is_singular() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        let e = resolvent(&f, c(3.0, 0.0), &WeightSpec::Const, 0.1, 64).unwrap_err();
        assert!(matches!(e, Error::Singular(_)), "{e}");
        let e = resolvent(&lp(&[(0, 5.0)]), c(5.0, 0.0), &WeightSpec::Const, 0.1, 64).unwrap_err();
        assert!(matches!(e, Error::Singular(_)));
    }

    #[test]
    fn neumann_radius_examples() {
        let w = WeightSpec::Const;
        let r = neumann_radius(&lp(&[(0, 2.0), (1, 1.0)]), c(0.0, 0.0), &w, 0.1, 64).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r = neumann_radius(&lp(&[(0, 5.0)]), c(0.0, 0.0), &w, 0.1, 64).unwrap();
        assert!((r - 5.0).abs() < 1e-12);
        let r = neumann_radius(&lp(&[(1, 1.0)]), c(2.0, 0.0), &w, 0.1, 64).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn neumann_matches_direct_close_in() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        let w = WeightSpec::Const;
        let mu = c(0.0, 0.0);
        let r_mu = resolvent(&f, mu, &w, 0.1, 64).unwrap();
        let lambda = c(0.3, 0.2);
        let direct = resolvent(&f, lambda, &w, 0.1, 64).unwrap();
        let series = neumann_resolvent(&r_mu.coeffs, lambda - mu, NEUMANN_TERMS, 64);
        assert!(series.max_abs_diff(&direct.coeffs) < 1e-12);
    }

    #[test]
    fn chi_examples() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        let k = Contour::circle(c(2.0, 0.0), 1.5, 64).unwrap();
        let opts = LevyOptions {
            epsilon: 0.05,
            ..LevyOptions::default()
        };
        let chi = construct_chi(&f, &k, &WeightSpec::exp(1.0).unwrap(), opts).unwrap();
        assert!((chi.r1 - 1.475).abs() < 1e-12);
        assert!((chi.r2 - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(chi.chi, WeightSpec::two_sided(chi.r1, chi.r2).unwrap());

        let poly = WeightSpec::poly(2.0).unwrap();
        assert_eq!(construct_chi(&f, &k, &poly, opts).unwrap().chi, poly);
        assert_eq!(
            construct_chi(&f, &k, &WeightSpec::Const, opts).unwrap().chi,
            WeightSpec::Const
        );
    }

    #[test]
    fn node_failure_names_the_node() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        // Passes through 3 = f(1).
        let k = Contour::circle(c(2.0, 0.0), 1.0, 8).unwrap();
        let e = construct_chi(&f, &k, &WeightSpec::Const, LevyOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Node { index: 0, .. }), "{e}");
        assert!(e.is_numerical());
    }

    #[test]
    fn exp_of_z_is_taylor_series() {
        let out = calculus(&lp(&[(1, 1.0)]), HolomorphicFn::Exp, &WeightSpec::Const);
        let mut fact = 1.0;
        for n in 0..=20 {
            if n > 0 {
                fact *= n as f64;
            }
            assert!(
                (out.coeff(n) - c(1.0 / fact, 0.0)).norm() < 1e-10,
                "n = {n}"
            );
        }
        assert!(out.coeff(-1).norm() < 1e-10);
    }

    #[test]
    fn reciprocal_matches_inverse() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        let out = calculus(&f, HolomorphicFn::Reciprocal, &WeightSpec::Const);
        let nu = construct_nu(&f, &WeightSpec::Const, 0.1).unwrap();
        let inv = invert(&f, &nu, 64).unwrap();
        assert!(out.max_abs_diff(&inv.coeffs) < 1e-8);
    }

    #[test]
    fn identity_and_square() {
        let f = lp(&[(-1, 1.0), (0, 3.0), (1, 1.0)]);
        let out = calculus(&f, HolomorphicFn::Identity, &WeightSpec::Const);
        assert!(out.max_abs_diff(&f) < 1e-10);
        let out = calculus(&f, HolomorphicFn::Square, &WeightSpec::exp(0.5).unwrap());
        assert!(out.max_abs_diff(&f.convolve(&f)) < 1e-9);
    }

    #[test]
    fn polyline_contour_works() {
        let f = lp(&[(1, 1.0)]);
        let square = vec![c(-1.5, -1.5), c(1.5, -1.5), c(1.5, 1.5), c(-1.5, 1.5)];
        let k = Contour::polyline(square, 256).unwrap();
        let chi = construct_chi(&f, &k, &WeightSpec::Const, LevyOptions::default()).unwrap();
        let out = functional_calculus(&f, &HolomorphicFn::Exp, &k, &chi).unwrap();
        assert!((out.coeffs.coeff(3) - c(1.0 / 6.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn report_checks_clauses() {
        let f = lp(&[(0, 2.0), (1, 1.0)]);
        let w = WeightSpec::exp(1.0).unwrap();
        let phi = HolomorphicFn::Exp;
        let k = build_contour(&f, &phi, DEFAULT_NODES, None).unwrap();
        let r = levy_report(&f, &phi, &k, &w, LevyOptions::default()).unwrap();
        assert!(r.clauses.all(), "{:?}", r.clauses);
        assert!(r.pointwise_error < 1e-10);
        let json = serde_json::to_string(&r).unwrap();
        let back: LevyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.result, r.result);
        assert_eq!(back.contour, r.contour);
    }

    #[test]
    fn phi_grammar_round_trips() {
        for s in [
            "id",
            "recip",
            "square",
            "exp",
            "rational:1+0i,2-1i:0+0i,1+0i",
        ] {
            let phi: HolomorphicFn = s.parse().unwrap();
            assert_eq!(phi.to_string().parse::<HolomorphicFn>().unwrap(), phi);
        }
        let r: HolomorphicFn = "rational:1:0,1".parse().unwrap();
        assert_eq!(r.poles().unwrap(), vec![c(0.0, 0.0)]);
        assert!((r.eval(c(2.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        assert!("rational:1:0".parse::<HolomorphicFn>().is_err());
        assert!("log".parse::<HolomorphicFn>().is_err());
    }
}
