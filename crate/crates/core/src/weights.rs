//! Weights on the integers and their characteristic radii.
//!
//! A weight is a map `ω : Z → [1, ∞)` with `ω(m + n) ≤ ω(m) ω(n)`. Its outer and
//! inner radii are
//!
//! ```text
//! ρ₁ = inf { ω(n)^{1/n} : n ≥ 1 },   ρ₂ = sup { ω(n)^{1/n} : n ≤ -1 },
//! ```
//!
//! and `0 < ρ₂ ≤ 1 ≤ ρ₁ < ∞`. Every closed-form family below has exact radii;
//! tabulated weights fall back to a Fekete-limit estimate.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance for every weight comparison.
pub const WEIGHT_RTOL: f64 = 1e-12;

/// Default window for finite sub-multiplicativity checks.
pub const DEFAULT_CHECK_WINDOW: i64 = 64;

/// Index at which tabulated tails are probed for the Fekete limit.
pub const FEKETE_PROBE: i64 = 1 << 52;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `ω ≡ 1`.
    Const,
    /// `e^{a|n|}`.
    Exp { a: f64 },
    /// `(1 + |n|)^α`.
    Poly { alpha: f64 },
    /// `1 + log(1 + |n|)`.
    Log,
    /// `(1 + |n|)^{√(1 + |n|)}`.
    PolyPow,
    /// `b^{|n| + c}`.
    Geom { base: f64, offset: f64 },
    /// `outer^n` for `n ≥ 0`, `inner^n` for `n ≤ 0`: the piecewise-geometric
    /// weights built for inverses and functional calculus.
    TwoSided { outer: f64, inner: f64 },
    /// Values on a window with an optional closed-form tail.
    Table(Arc<WeightTable>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    low: i64,
    values: Vec<f64>,
    tail: Option<WeightSpec>,
    source: String,
}

#[derive(Deserialize)]
struct TableFile {
    low: i64,
    values: Vec<f64>,
    #[serde(default)]
    tail: Option<String>,
}

impl WeightTable {
    pub fn new(low: i64, values: Vec<f64>, tail: Option<WeightSpec>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("weight table is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Argument(format!(
                "weight table value {bad} is not positive"
            )));
        }
        if matches!(tail, Some(WeightSpec::Table(_))) {
            return Err(Error::Argument(
                "a table tail must be a closed-form family".into(),
            ));
        }
        Ok(Self {
            low,
            values,
            tail,
            source: "<inline>".into(),
        })
    }

    /// Loads `{"low": <int>, "values": [...], "tail": "<spec>"}`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let file: TableFile = serde_json::from_str(&text)?;
        let tail = file.tail.as_deref().map(str::parse).transpose()?;
        let mut table = Self::new(file.low, file.values, tail)?;
        table.source = path.display().to_string();
        Ok(table)
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.values.len() as i64 - 1
    }

    pub fn tail(&self) -> Option<&WeightSpec> {
        self.tail.as_ref()
    }

    fn get(&self, n: i64) -> Option<f64> {
        if n < self.low || n > self.high() {
            return None;
        }
        Some(self.values[(n - self.low) as usize])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    ClosedForm,
    NumericLimit,
}

/// Inner and outer radii `(ρ₂, ρ₁)` of a weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusPair {
    pub rho2: f64,
    pub rho1: f64,
    pub exactness: Exactness,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `ω(m + n) > ω(m) ω(n)`.
    Submultiplicativity { m: i64, n: i64 },
    /// `ω(n) < 1`.
    BelowOne { n: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmultiplicativeReport {
    pub ok: bool,
    pub first_violation: Option<Violation>,
}

impl WeightSpec {
    pub fn exp(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Argument(format!("exp weight needs a > 0, got {a}")));
        }
        Ok(Self::Exp { a })
    }

    pub fn poly(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Argument(format!(
                "poly weight needs alpha > 0, got {alpha}"
            )));
        }
        Ok(Self::Poly { alpha })
    }

    pub fn geom(base: f64, offset: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) || !(offset >= 0.0 && offset.is_finite()) {
            return Err(Error::Argument(format!(
                "geom weight needs b > 1 and c >= 0, got b = {base}, c = {offset}"
            )));
        }
        Ok(Self::Geom { base, offset })
    }

    pub fn two_sided(outer: f64, inner: f64) -> Result<Self> {
        if !(outer >= 1.0 && outer.is_finite()) || !(inner > 0.0 && inner <= 1.0) {
            return Err(Error::Argument(format!(
                "two-sided weight needs outer >= 1 and 0 < inner <= 1, got {outer}, {inner}"
            )));
        }
        Ok(Self::TwoSided { outer, inner })
    }

    pub fn table(table: WeightTable) -> Self {
        Self::Table(Arc::new(table))
    }

    /// `ln ω(n)`; finite for indices where `ω(n)` itself would overflow.
    pub fn ln_eval(&self, n: i64) -> Result<f64> {
        let abs = n.unsigned_abs() as f64;
        Ok(match self {
            Self::Const => 0.0,
            Self::Exp { a } => a * abs,
            Self::Poly { alpha } => alpha * abs.ln_1p(),
            Self::Log => abs.ln_1p().ln_1p(),
            Self::PolyPow => (1.0 + abs).sqrt() * abs.ln_1p(),
            Self::Geom { base, offset } => (abs + offset) * base.ln(),
            Self::TwoSided { outer, inner } => {
                if n >= 0 {
                    n as f64 * outer.ln()
                } else {
                    n as f64 * inner.ln()
                }
            }
            Self::Table(t) => match t.get(n) {
                Some(v) => v.ln(),
                None => match &t.tail {
                    Some(tail) => tail.ln_eval(n)?,
                    None => {
                        return Err(Error::Domain(format!(
                            "table weight {} has no value at n = {n} and no tail rule",
                            t.source
                        )))
                    }
                },
            },
        })
    }

    /// `ω(n)`.
    pub fn eval(&self, n: i64) -> Result<f64> {
        let abs = n.unsigned_abs() as f64;
        Ok(match self {
            Self::Const => 1.0,
            Self::Exp { a } => (a * abs).exp(),
            Self::Poly { alpha } => (1.0 + abs).powf(*alpha),
            Self::Log => 1.0 + abs.ln_1p(),
            Self::PolyPow => (1.0 + abs).powf((1.0 + abs).sqrt()),
            Self::Geom { base, offset } => base.powf(abs + offset),
            Self::TwoSided { outer, inner } => {
                if n >= 0 {
                    outer.powf(n as f64)
                } else {
                    inner.powf(n as f64)
                }
            }
            Self::Table(t) => match t.get(n) {
                Some(v) => v,
                None => self.ln_eval(n)?.exp(),
            },
        })
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::TwoSided { outer, inner } => *outer * *inner == 1.0,
            Self::Table(_) => false,
            _ => true,
        }
    }

    /// Checks `ω ≥ 1` and `ω(m + n) ≤ ω(m) ω(n)` for all `|m|, |n| ≤ window`.
    ///
    /// Pairs are scanned shell by shell (`max(|m|, |n|)` increasing), positive
    /// indices first, so the reported violation is the smallest one.
    pub fn check_submultiplicative(&self, window: i64) -> Result<SubmultiplicativeReport> {
        if window < 1 {
            return Err(Error::Argument(format!(
                "window must be >= 1, got {window}"
            )));
        }
        let logs: Vec<f64> = (-window..=window)
            .map(|n| self.ln_eval(n))
            .collect::<Result<_>>()?;
        let ln = |n: i64| logs[(n + window) as usize];

        let tol = WEIGHT_RTOL.ln_1p();
        for n in (0..=window).flat_map(|k| [k, -k]) {
            if ln(n) < -tol {
                return Ok(SubmultiplicativeReport {
                    ok: false,
                    first_violation: Some(Violation::BelowOne { n }),
                });
            }
        }

        let mut pairs: Vec<(i64, i64)> = (-window..=window)
            .flat_map(|m| (-window..=window).map(move |n| (m, n)))
            .collect();
        pairs.sort_by_key(|&(m, n)| (m.abs().max(n.abs()), m < 0, n < 0, m.abs(), n.abs()));
        for (m, n) in pairs {
            let lhs = if (m + n).abs() <= window {
                ln(m + n)
            } else {
                self.ln_eval(m + n)?
            };
            if lhs > ln(m) + ln(n) + tol {
                return Ok(SubmultiplicativeReport {
                    ok: false,
                    first_violation: Some(Violation::Submultiplicativity { m, n }),
                });
            }
        }
        Ok(SubmultiplicativeReport {
            ok: true,
            first_violation: None,
        })
    }

    /// The radii `(ρ₂, ρ₁)`: closed form for every family except tables.
    pub fn rho_bounds(&self) -> Result<RadiusPair> {
        let closed = |rho2: f64, rho1: f64| RadiusPair {
            rho2,
            rho1,
            exactness: Exactness::ClosedForm,
        };
        Ok(match self {
            Self::Const | Self::Poly { .. } | Self::Log | Self::PolyPow => closed(1.0, 1.0),
            Self::Exp { a } => closed((-a).exp(), a.exp()),
            Self::Geom { base, .. } => closed(1.0 / base, *base),
            Self::TwoSided { outer, inner } => closed(*inner, *outer),
            Self::Table(t) => {
                let probe = if t.tail.is_some() {
                    FEKETE_PROBE
                } else {
                    t.high().max(-t.low).max(1)
                };
                self.fekete_estimate(probe)?
            }
        })
    }

    /// Fekete-limit estimate of the radii using indices up to `probe`.
    ///
    /// Sub-multiplicativity makes `ln ω(n) / n` converge to its infimum, so the
    /// minimum over the sampled indices (the table window, powers of two, and
    /// `probe` itself) is an upper estimate of `ρ₁` that tightens as `probe`
    /// grows; `ρ₂` is handled symmetrically.
    pub fn fekete_estimate(&self, probe: i64) -> Result<RadiusPair> {
        if probe < 1 {
            return Err(Error::Argument(format!("probe must be >= 1, got {probe}")));
        }
        let mut candidates: Vec<i64> = std::iter::successors(Some(1i64), |k| k.checked_mul(2))
            .take_while(|&k| k < probe)
            .chain(std::iter::once(probe))
            .collect();
        if let Self::Table(t) = self {
            candidates.extend(1..=t.high().min(probe));
            candidates.extend(1..=(-t.low).min(probe));
        }

        let mut log_rho1 = f64::INFINITY;
        let mut log_rho2 = f64::NEG_INFINITY;
        for &n in &candidates {
            if let Ok(v) = self.ln_eval(n) {
                log_rho1 = log_rho1.min(v / n as f64);
            }
            if let Ok(v) = self.ln_eval(-n) {
                log_rho2 = log_rho2.max(-v / n as f64);
            }
        }
        if !log_rho1.is_finite() || !log_rho2.is_finite() {
            return Err(Error::Domain(
                "weight has no values on one side of the origin; radii undefined".into(),
            ));
        }
        Ok(RadiusPair {
            rho2: log_rho2.exp().min(1.0),
            rho1: log_rho1.exp().max(1.0),
            exactness: Exactness::NumericLimit,
        })
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Const => true,
            Self::TwoSided { outer, inner } => *outer == 1.0 && *inner == 1.0,
            Self::Table(t) => {
                let first = t.values[0];
                let flat = t.values.iter().all(|v| *v == first);
                flat && match &t.tail {
                    None => true,
                    Some(tail) => tail.is_constant() && first == 1.0,
                }
            }
            _ => false,
        }
    }

    /// `self(n) ≤ other(n)·(1 + 1e-12)` for all `|n| ≤ window`.
    pub fn pointwise_leq(&self, other: &WeightSpec, window: i64) -> Result<bool> {
        if window < 1 {
            return Err(Error::Argument(format!(
                "window must be >= 1, got {window}"
            )));
        }
        let tol = WEIGHT_RTOL.ln_1p();
        for n in -window..=window {
            if self.ln_eval(n)? > other.ln_eval(n)? + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const => write!(f, "const"),
            Self::Exp { a } => write!(f, "exp:{a}"),
            Self::Poly { alpha } => write!(f, "poly:{alpha}"),
            Self::Log => write!(f, "log"),
            Self::PolyPow => write!(f, "polypow"),
            Self::Geom { base, offset } => write!(f, "geom:{base}:{offset}"),
            Self::TwoSided { outer, inner } => write!(f, "twosided:{outer}:{inner}"),
            Self::Table(t) => write!(f, "table:{}", t.source),
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}` in weight spec")))
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("table:") {
            return Ok(Self::table(WeightTable::load(path)?));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["const"] => Ok(Self::Const),
            ["log"] => Ok(Self::Log),
            ["polypow"] => Ok(Self::PolyPow),
            ["exp", a] => Self::exp(parse_num(a, "a")?),
            ["poly", alpha] => Self::poly(parse_num(alpha, "alpha")?),
            ["geom", b, c] => Self::geom(parse_num(b, "b")?, parse_num(c, "c")?),
            ["twosided", r1, r2] => Self::two_sided(parse_num(r1, "r1")?, parse_num(r2, "r2")?),
            _ => Err(Error::Parse(format!(
                "unknown weight spec `{s}` (expected const | exp:<a> | poly:<alpha> | log | \
                 polypow | geom:<b>:<c> | twosided:<r1>:<r2> | table:<path>)"
            ))),
        }
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
