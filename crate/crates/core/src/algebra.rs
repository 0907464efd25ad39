//! The Beurling algebra `ℓ¹(Z, ω)`: weighted norms, the Gelfand annulus,
//! nonvanishing scans and certified summability of coefficient tails.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::LaurentPolynomial;
use crate::weights::WeightSpec;

/// Partial sums beyond this count as divergent when terms stop decreasing.
pub const DIVERGENCE_CAP: f64 = 1e12;

/// Rate ratios within this of 1 fall to the term-growth test.
const RATIO_TOL: f64 = 1e-12;

/// Stored terms may dip this much (relative) and still count as non-decreasing.
const MONOTONE_RTOL: f64 = 1e-9;

/// How many trailing stored terms the boundary test inspects.
const MONOTONE_WINDOW: usize = 8;

/// `Σ |a_n| ω(n)` over the support.
pub fn weighted_norm(a: &LaurentPolynomial, w: &WeightSpec) -> Result<f64> {
    a.terms()
        .try_fold(0.0, |acc, (n, c)| Ok(acc + c.norm() * w.eval(n)?))
}

/// Closed annulus `{inner ≤ |z| ≤ outer}` around the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner <= 1.0 && outer >= 1.0 && outer.is_finite()) {
            return Err(Error::Argument(format!(
                "annulus needs 0 < inner <= 1 <= outer, got [{inner}, {outer}]"
            )));
        }
        Ok(Self { inner, outer })
    }

    pub fn unit_circle() -> Self {
        Self {
            inner: 1.0,
            outer: 1.0,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r >= self.inner * (1.0 - RATIO_TOL) && r <= self.outer * (1.0 + RATIO_TOL)
    }
}

/// The Gelfand space of `A(ω)`: `{ρ₂(ω) ≤ |z| ≤ ρ₁(ω)}`.
pub fn gelfand_annulus(w: &WeightSpec) -> Result<Annulus> {
    let r = w.rho_bounds()?;
    Annulus::new(r.rho2, r.rho1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub radii: usize,
    pub angles: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            radii: 33,
            angles: 1024,
        }
    }
}

impl Grid {
    /// The nested refinement: every point of `self` is a point of the result.
    pub fn refined(self) -> Self {
        Self {
            radii: 2 * self.radii - 1,
            angles: 2 * self.angles,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinModulus {
    pub value: f64,
    pub argmin: Complex64,
}

/// Minimum of `|f|` over a log-radial grid on the annulus.
///
/// A zero of `f` inside the annulus (found by root-finding, not by the grid)
/// forces the value to 0 with the zero as argmin.
pub fn min_modulus(f: &LaurentPolynomial, ann: &Annulus, grid: Grid) -> Result<MinModulus> {
    if grid.radii == 0 || grid.angles == 0 {
        return Err(Error::Argument(
            "grid needs at least one radius and angle".into(),
        ));
    }
    if f.is_zero() {
        return Ok(MinModulus {
            value: 0.0,
            argmin: Complex64::new(1.0, 0.0),
        });
    }
    if let Some(z) = f.zeros()?.into_iter().find(|z| ann.contains(*z)) {
        return Ok(MinModulus {
            value: 0.0,
            argmin: z,
        });
    }

    let ratio = ann.outer / ann.inner;
    let mut best = MinModulus {
        value: f64::INFINITY,
        argmin: Complex64::new(ann.inner, 0.0),
    };
    for i in 0..grid.radii {
        let r = if grid.radii == 1 {
            ann.inner
        } else {
            ann.inner * ratio.powf(i as f64 / (grid.radii - 1) as f64)
        };
        for j in 0..grid.angles {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / grid.angles as f64);
            let v = f.evaluate(z)?.norm();
            if v < best.value {
                best = MinModulus {
                    value: v,
                    argmin: z,
                };
            }
        }
    }
    Ok(best)
}

/// What is known about coefficients beyond the stored support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// Nothing beyond the stored support: the element is finitely supported.
    Finite,
    /// `|c_n| ≲ outer_rate^{−n}` as `n → +∞` and `|c_n| ≲ inner_rate^{|n|}` as
    /// `n → −∞`. A missing rate means that side is finitely supported.
    GeometricTwoSided {
        outer_rate: Option<f64>,
        inner_rate: Option<f64>,
    },
}

/// An element of `ℓ¹(Z, ω)`: stored coefficients, the weight, the exact
/// weighted norm of the stored part and what is known about the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeurlingElement {
    #[serde(flatten)]
    pub coeffs: LaurentPolynomial,
    pub weight: WeightSpec,
    pub norm: f64,
    #[serde(default)]
    pub tail: Option<TailModel>,
}

/// Growth of the weighted terms on one side of the origin.
#[derive(Clone, Copy, Debug)]
struct SideTail {
    /// Per-step ratio of successive weighted terms far out.
    ratio: f64,
    /// Weighted term at the last stored index on this side.
    edge_term: f64,
    edge_index: i64,
    /// Trailing stored terms, outermost last.
    trailing: [f64; MONOTONE_WINDOW],
    trailing_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceWitness {
    /// First index at which the partial sums pass [`DIVERGENCE_CAP`].
    pub index: i64,
    /// The weighted term `|c_n| ω(n)` there.
    pub term: f64,
    pub partial_sum: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Summability {
    Convergent { bound: f64 },
    Divergent { witness: DivergenceWitness },
    Inconclusive,
}

impl BeurlingElement {
    pub fn new(
        coeffs: LaurentPolynomial,
        weight: WeightSpec,
        tail: Option<TailModel>,
    ) -> Result<Self> {
        let norm = weighted_norm(&coeffs, &weight)?;
        Ok(Self {
            coeffs,
            weight,
            norm,
            tail,
        })
    }

    pub fn finite(coeffs: LaurentPolynomial, weight: WeightSpec) -> Result<Self> {
        Self::new(coeffs, weight, Some(TailModel::Finite))
    }

    /// Same coefficients and tail, measured against another weight.
    pub fn reweighted(&self, weight: WeightSpec) -> Result<Self> {
        Self::new(self.coeffs.clone(), weight, self.tail)
    }

    fn side(&self, positive: bool, rate: Option<f64>) -> Result<Option<SideTail>> {
        let Some(rate) = rate else {
            return Ok(None);
        };
        let radii = self.weight.rho_bounds()?;
        let mut stored: Vec<(i64, f64)> = Vec::new();
        let terms: Box<dyn Iterator<Item = (i64, Complex64)>> = if positive {
            Box::new(self.coeffs.terms().rev().take_while(|(n, _)| *n >= 0))
        } else {
            Box::new(self.coeffs.terms().take_while(|(n, _)| *n < 0))
        };
        for (n, c) in terms.take(MONOTONE_WINDOW) {
            stored.push((n, c.norm() * self.weight.eval(n)?));
        }
        let Some(&(edge_index, edge_term)) = stored.first() else {
            return Ok(None);
        };
        stored.reverse();
        let mut trailing = [0.0; MONOTONE_WINDOW];
        for (slot, (_, t)) in trailing.iter_mut().zip(&stored) {
            *slot = *t;
        }

        // Asymptotic weight growth per step is ρ₁ outward and 1/ρ₂ inward;
        // the local step ratio at the edge is used when it is larger.
        let step = if positive { 1 } else { -1 };
        let local = match self.weight.ln_eval(edge_index + step) {
            Ok(next) => (next - self.weight.ln_eval(edge_index)?).exp(),
            Err(_) => f64::INFINITY,
        };
        let (asymptotic, decay) = if positive {
            (radii.rho1, 1.0 / rate)
        } else {
            (1.0 / radii.rho2, rate)
        };
        let mut ratio = asymptotic * decay;
        if local * decay < 1.0 {
            ratio = ratio.max(local * decay);
        }
        Ok(Some(SideTail {
            ratio,
            edge_term,
            edge_index,
            trailing,
            trailing_len: stored.len(),
        }))
    }

    fn sides(&self) -> Result<[Option<SideTail>; 2]> {
        match self.tail {
            Some(TailModel::GeometricTwoSided {
                outer_rate,
                inner_rate,
            }) => Ok([self.side(true, outer_rate)?, self.side(false, inner_rate)?]),
            _ => Ok([None, None]),
        }
    }

    /// Estimated weighted mass beyond the stored support, from the tail model.
    /// `None` when the tail is unknown or not summable.
    pub fn tail_bound(&self) -> Result<Option<f64>> {
        match self.tail {
            None => Ok(None),
            Some(TailModel::Finite) => Ok(Some(0.0)),
            Some(TailModel::GeometricTwoSided { .. }) => {
                let mut total = 0.0;
                for side in self.sides()?.into_iter().flatten() {
                    if side.ratio >= 1.0 {
                        return Ok(None);
                    }
                    total += side.edge_term * side.ratio / (1.0 - side.ratio);
                }
                Ok(Some(total))
            }
        }
    }

    /// Stored norm plus the tail estimate (infinite when not summable).
    pub fn norm_bound(&self) -> Result<f64> {
        Ok(self.norm + self.tail_bound()?.unwrap_or(f64::INFINITY))
    }
}

fn divergence_witness(side: &SideTail, stored_sum: f64, positive: bool) -> DivergenceWitness {
    let dir = if positive { 1 } else { -1 };
    let t = side.edge_term;
    let q = side.ratio;
    let deficit = (DIVERGENCE_CAP - stored_sum).max(0.0);
    // Smallest k with Σ_{j=1..k} t q^j ≥ deficit (t at the edge, growing by q).
    let k = if (q - 1.0).abs() <= RATIO_TOL {
        (deficit / t).ceil().max(1.0)
    } else {
        let x = 1.0 + deficit * (q - 1.0) / (t * q);
        (x.ln() / q.ln()).ceil().max(1.0)
    };
    let growth = if (q - 1.0).abs() <= RATIO_TOL {
        1.0
    } else {
        q.powf(k)
    };
    let partial = if (q - 1.0).abs() <= RATIO_TOL {
        stored_sum + k * t
    } else {
        stored_sum + t * q * (q.powf(k) - 1.0) / (q - 1.0)
    };
    DivergenceWitness {
        index: side.edge_index + dir * k as i64,
        term: t * growth,
        partial_sum: partial,
    }
}

fn non_decreasing(side: &SideTail) -> bool {
    let t = &side.trailing[..side.trailing_len];
    t.len() >= 2
        && t[t.len() - 1] > 0.0
        && t.windows(2).all(|p| p[1] >= p[0] * (1.0 - MONOTONE_RTOL))
}

/// Root test on the weighted terms `|c_n| ω(n)` using the element's tail model.
///
/// Each side converges when the coefficient decay rate beats the weight's
/// growth rate. A side whose ratio is exactly 1 diverges only if its stored
/// terms have stopped decreasing; otherwise the verdict is inconclusive.
pub fn classify_summability(e: &BeurlingElement) -> Result<Summability> {
    match e.tail {
        None => return Ok(Summability::Inconclusive),
        Some(TailModel::Finite) => return Ok(Summability::Convergent { bound: e.norm }),
        Some(TailModel::GeometricTwoSided { .. }) => {}
    }
    let sides = e.sides()?;
    let mut inconclusive = false;
    for (side, positive) in sides.iter().zip([true, false]) {
        let Some(side) = side else { continue };
        if side.ratio < 1.0 - RATIO_TOL {
            continue;
        }
        let boundary = side.ratio <= 1.0 + RATIO_TOL;
        if side.edge_term > 0.0 && (!boundary || non_decreasing(side)) {
            return Ok(Summability::Divergent {
                witness: divergence_witness(side, e.norm, positive),
            });
        }
        inconclusive = true;
    }
    if inconclusive {
        return Ok(Summability::Inconclusive);
    }
    let tail = e.tail_bound()?.unwrap_or(0.0);
    Ok(Summability::Convergent {
        bound: e.norm + tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(terms: &[(i64, f64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_real(terms.iter().copied())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Inverse of 2z + z² from its closed-form series, on [−1, n_max].
    fn remark3_inverse(n_max: i64) -> LaurentPolynomial {
        LaurentPolynomial::from_real(
            (-1..=n_max).map(|n| (n, (-1f64).powi(n as i32 + 1) / 2f64.powi(n as i32 + 2))),
        )
    }

    fn remark3_tail() -> Option<TailModel> {
        Some(TailModel::GeometricTwoSided {
            outer_rate: Some(2.0),
            inner_rate: None,
        })
    }

    #[test]
    fn weighted_norm_examples() {
        assert_eq!(
            weighted_norm(&lp(&[(1, 2.0), (2, 1.0)]), &WeightSpec::Const).unwrap(),
            3.0
        );
        let poly1 = WeightSpec::poly(1.0).unwrap();
        assert_eq!(
            weighted_norm(&LaurentPolynomial::one(), &poly1).unwrap(),
            1.0
        );
        let geom = WeightSpec::geom(2.0, 2.0).unwrap();
        for n_max in [10, 40, 64] {
            let got = weighted_norm(&remark3_inverse(n_max), &geom).unwrap();
            assert!((got - (4.0 + (n_max + 1) as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn annulus_examples() {
        assert_eq!(
            gelfand_annulus(&WeightSpec::Const).unwrap(),
            Annulus::unit_circle()
        );
        let a = gelfand_annulus(&WeightSpec::exp(1.0).unwrap()).unwrap();
        assert!((a.inner - (-1f64).exp()).abs() < 1e-15 && (a.outer - 1f64.exp()).abs() < 1e-15);
        let a = gelfand_annulus(&WeightSpec::geom(2.0, 2.0).unwrap()).unwrap();
        assert_eq!((a.inner, a.outer), (0.5, 2.0));
    }

    #[test]
    fn min_modulus_examples() {
        let two_plus_z = lp(&[(0, 2.0), (1, 1.0)]);
        let m = min_modulus(
            &two_plus_z,
            &Annulus::unit_circle(),
            Grid {
                radii: 1,
                angles: 4,
            },
        )
        .unwrap();
        assert!((m.value - 1.0).abs() < 1e-15);
        assert!((m.argmin - c(-1.0)).norm() < 1e-15);

        let two_minus_z = lp(&[(0, 2.0), (1, -1.0)]);
        let ann = gelfand_annulus(&WeightSpec::exp(1.0).unwrap()).unwrap();
        let m = min_modulus(&two_minus_z, &ann, Grid::default()).unwrap();
        assert_eq!(m.value, 0.0);
        assert!((m.argmin - c(2.0)).norm() < 1e-14);

        let f = lp(&[(1, 2.0), (2, 1.0)]);
        let m = min_modulus(
            &f,
            &Annulus::unit_circle(),
            Grid {
                radii: 1,
                angles: 256,
            },
        )
        .unwrap();
        assert!((m.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn min_modulus_refinement_is_monotone() {
        let f = lp(&[(-1, 0.7), (0, 3.0), (2, -0.4)]);
        let ann = Annulus::new(0.6, 1.8).unwrap();
        let mut grid = Grid {
            radii: 3,
            angles: 8,
        };
        let mut last = f64::INFINITY;
        for _ in 0..5 {
            let m = min_modulus(&f, &ann, grid).unwrap().value;
            assert!(m <= last);
            last = m;
            grid = grid.refined();
        }
    }

    #[test]
    fn remark3_diverges_under_its_weight() {
        let geom = WeightSpec::geom(2.0, 2.0).unwrap();
        let e = BeurlingElement::new(remark3_inverse(64), geom, remark3_tail()).unwrap();
        match classify_summability(&e).unwrap() {
            Summability::Divergent { witness } => {
                assert!((witness.term - 1.0).abs() < 1e-12);
                assert!(witness.partial_sum >= DIVERGENCE_CAP);
                assert!(witness.partial_sum - witness.term < DIVERGENCE_CAP);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn remark3_converges_in_l1() {
        // Σ_{n ≥ −1} 2^{−(n+2)} = 1
        let e =
            BeurlingElement::new(remark3_inverse(64), WeightSpec::Const, remark3_tail()).unwrap();
        match classify_summability(&e).unwrap() {
            Summability::Convergent { bound } => assert!((bound - 1.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn remark3_converges_under_slower_weight() {
        let nu = WeightSpec::two_sided(1.9, 0.5).unwrap();
        let e = BeurlingElement::new(remark3_inverse(64), nu, remark3_tail()).unwrap();
        let Summability::Convergent { bound } = classify_summability(&e).unwrap() else {
            panic!("expected convergence");
        };
        // c_{−1}·2 + Σ_{n≥0} (1.9/2)^n / 4, the stored part exact and the tail geometric.
        let oracle = 0.5 * 2.0 + 0.25 / (1.0 - 0.95);
        assert!((bound - oracle).abs() < 1e-10, "{bound} vs {oracle}");
    }

    #[test]
    fn unknown_tail_is_inconclusive() {
        let e = BeurlingElement::new(remark3_inverse(10), WeightSpec::Const, None).unwrap();
        assert_eq!(classify_summability(&e).unwrap(), Summability::Inconclusive);
    }

    #[test]
    fn boundary_ratio_with_decaying_terms_is_inconclusive() {
        // |c_n| = 2^{−n}/(n+1): ratio 1 against geom:2 but terms still fall.
        let coeffs = LaurentPolynomial::from_real(
            (0..40).map(|n| (n, 0.5f64.powi(n as i32) / (n + 1) as f64)),
        );
        let tail = Some(TailModel::GeometricTwoSided {
            outer_rate: Some(2.0),
            inner_rate: None,
        });
        let e = BeurlingElement::new(coeffs, WeightSpec::geom(2.0, 0.0).unwrap(), tail).unwrap();
        assert_eq!(classify_summability(&e).unwrap(), Summability::Inconclusive);
    }

    #[test]
    fn finite_support_is_exact() {
        let a = lp(&[(-3, 1.0), (0, -2.0), (5, 0.25)]);
        for w in [
            WeightSpec::Const,
            WeightSpec::exp(1.0).unwrap(),
            WeightSpec::PolyPow,
        ] {
            let e = BeurlingElement::finite(a.clone(), w.clone()).unwrap();
            assert_eq!(
                classify_summability(&e).unwrap(),
                Summability::Convergent {
                    bound: weighted_norm(&a, &w).unwrap()
                }
            );
        }
    }

    #[test]
    fn element_json_round_trip() {
        let e = BeurlingElement::new(
            remark3_inverse(5),
            WeightSpec::geom(2.0, 2.0).unwrap(),
            remark3_tail(),
        )
        .unwrap();
        let text = serde_json::to_string(&e).unwrap();
        let back: BeurlingElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert!(text.contains(r#""weight":"geom:2:2""#));
    }
}
