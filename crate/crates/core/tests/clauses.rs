use beurling::levy::DEFAULT_NODES;
use beurling::{
    build_contour, levy_report, wiener_report, HolomorphicFn, InvertOptions, LaurentPolynomial,
    LevyOptions, WeightSpec,
};

fn families() -> Vec<WeightSpec> {
    ["const", "exp:1", "poly:2", "geom:2:2"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn elements() -> Vec<(&'static str, LaurentPolynomial)> {
    vec![
        ("2+z", LaurentPolynomial::from_real([(0, 2.0), (1, 1.0)])),
        ("2-z", LaurentPolynomial::from_real([(0, 2.0), (1, -1.0)])),
        ("2z+z^2", LaurentPolynomial::from_real([(1, 2.0), (2, 1.0)])),
        (
            "3+z+1/z",
            LaurentPolynomial::from_real([(-1, 1.0), (0, 3.0), (1, 1.0)]),
        ),
        (
            "z^-2(3+z+1/z)",
            LaurentPolynomial::from_real([(-3, 1.0), (-2, 3.0), (-1, 1.0)]),
        ),
    ]
}

#[test]
fn nu_clauses_hold_across_the_matrix() {
    for w in families() {
        let rho = w.rho_bounds().unwrap();
        for (name, f) in elements() {
            let r = wiener_report(&f, &w, 0.1, InvertOptions::default()).unwrap();
            assert!(r.clauses.all(), "{name} under {w}: {:?}", r.clauses);
            let c = &r.construction;
            assert!(
                rho.rho2 <= c.r2 && c.r2 <= 1.0 && 1.0 <= c.r1 && c.r1 <= rho.rho1,
                "{name} under {w}"
            );
            // Under a growing ν the truncation edge dominates the residual.
            if w.is_constant() {
                assert!(r.residual < 1e-10, "{name}: residual {}", r.residual);
            }
        }
    }
}

#[test]
fn chi_clauses_hold_across_the_matrix() {
    let phi = HolomorphicFn::Exp;
    for w in families() {
        let rho = w.rho_bounds().unwrap();
        for (name, f) in elements() {
            let k = build_contour(&f, &phi, DEFAULT_NODES, None).unwrap();
            let r = levy_report(&f, &phi, &k, &w, LevyOptions::default()).unwrap();
            assert!(r.clauses.all(), "{name} under {w}: {:?}", r.clauses);
            let c = &r.construction;
            assert!(
                rho.rho2 <= c.r2 && c.r2 <= 1.0 && 1.0 <= c.r1 && c.r1 <= rho.rho1,
                "{name} under {w}"
            );
            assert!(
                r.pointwise_error < 1e-8,
                "{name} under {w}: {}",
                r.pointwise_error
            );
        }
    }
}
