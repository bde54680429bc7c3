use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use sparsezeros::basis::{fs_basis, torus_basis, OrthoBasis};
use sparsezeros::ensembles::{
    sample_polynomial, sample_system, CoefficientLaw, LaurentPolynomial, StreamKey,
};
use sparsezeros::polytope::IntegralPolytope;
use sparsezeros::solver::{
    amoeba_sample, chordal, roots_univariate, roots_univariate_laurent, solve_bivariate,
    solve_bivariate_laurent, verify_count, SolverOptions, RESIDUAL_TOL,
};

fn basis(p: &IntegralPolytope, n: u32) -> Arc<OrthoBasis> {
    Arc::new(torus_basis(p, n).unwrap())
}

fn gaussian_pair(p: &IntegralPolytope, n: u32, trial: u64) -> (sparsezeros::ensembles::RandomPolynomial, sparsezeros::ensembles::RandomPolynomial) {
    let b = basis(p, n);
    let specs = vec![
        (b.clone(), CoefficientLaw::ComplexGaussianStd),
        (b, CoefficientLaw::ComplexGaussianStd),
    ];
    let s = sample_system(&specs, 2024, 1, trial).unwrap();
    let mut it = s.components.into_iter();
    (it.next().unwrap(), it.next().unwrap())
}

#[test]
fn univariate_gaussian_concentrates_on_circle() {
    let p = IntegralPolytope::interval(0, 1).unwrap();
    let f = sample_polynomial(basis(&p, 50), &CoefficientLaw::ComplexGaussianStd, StreamKey::new(1, 0, 0));
    let zs = roots_univariate(&f).unwrap();
    assert_eq!(zs.len(), 50);
    let near = zs.points.iter().filter(|z| (z[0].norm() - 1.0).abs() < 0.2).count();
    assert!(near >= 45, "{near} of 50 near the unit circle");
    assert!(zs.residuals.iter().all(|r| *r < RESIDUAL_TOL));
}

#[test]
fn square_system_counts() {
    let sq = IntegralPolytope::unit_cube(2).unwrap();
    let ps = [sq.clone(), sq.clone()];
    for n in 1..=3u32 {
        let mut matched = 0;
        for trial in 0..100 {
            let (f, g) = gaussian_pair(&sq, n, trial);
            let zs = solve_bivariate(&f, &g).unwrap();
            assert!(zs.residuals.iter().all(|r| *r < RESIDUAL_TOL));
            let rep = verify_count(&zs, &ps, n).unwrap();
            assert_eq!(rep.expected, 2 * (n as u64).pow(2));
            if rep.matched {
                matched += 1;
            } else {
                assert!(rep.discarded > 0 || rep.suspects > 0, "{rep:?}");
            }
        }
        assert!(matched >= 95, "N = {n}: {matched}/100");
    }
}

#[test]
fn simplex_and_trapezoid_counts() {
    let s = IntegralPolytope::simplex(2).unwrap();
    let (f, g) = gaussian_pair(&s, 2, 0);
    let zs = solve_bivariate(&f, &g).unwrap();
    let rep = verify_count(&zs, &[s.clone(), s], 2).unwrap();
    assert_eq!(rep.expected, 4);
    assert!(rep.matched, "{rep:?}");

    let t = IntegralPolytope::trapezoid(5).unwrap();
    let (f, g) = gaussian_pair(&t, 1, 0);
    let zs = solve_bivariate(&f, &g).unwrap();
    let rep = verify_count(&zs, &[t.clone(), t], 1).unwrap();
    assert_eq!(rep.expected, 6);
    assert!(rep.matched, "{rep:?}");
}

#[test]
fn fubini_study_square_counts() {
    let sq = IntegralPolytope::unit_cube(2).unwrap();
    let b = Arc::new(fs_basis(&sq, 4, 2).unwrap());
    let specs = vec![
        (b.clone(), CoefficientLaw::ComplexGaussianStd),
        (b, CoefficientLaw::ComplexGaussianStd),
    ];
    let s = sample_system(&specs, 5, 5, 0).unwrap();
    let zs = solve_bivariate(&s.components[0], &s.components[1]).unwrap();
    let rep = verify_count(&zs, &[sq.clone(), sq], 4).unwrap();
    assert!(rep.matched, "{rep:?}");
}

#[test]
fn torus_rotation_equivariance() {
    let sq = IntegralPolytope::unit_cube(2).unwrap();
    let (f, g) = gaussian_pair(&sq, 2, 7);
    let (f, g) = (f.to_laurent(), g.to_laurent());
    let lam = Complex64::from_polar(1.0, 0.913);
    let rot = |p: &LaurentPolynomial| LaurentPolynomial {
        m: 2,
        terms: p.terms.iter().map(|(e, c)| (e.clone(), c * lam.powi(e.0[0] as i32))).collect(),
    };
    let opts = SolverOptions::default();
    let z = solve_bivariate_laurent(&f, &g, &opts).unwrap();
    let w = solve_bivariate_laurent(&rot(&f), &rot(&g), &opts).unwrap();
    assert_eq!(z.len(), w.len());
    for p in &z.points {
        let mapped = [p[0] / lam, p[1]];
        let best = w.points.iter().map(|q| chordal(q, &mapped)).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-8, "no match for {p:?}: {best}");
    }
}

#[test]
fn amoeba_is_bounded_in_spread() {
    let sq = IntegralPolytope::unit_cube(2).unwrap();
    let f = sample_polynomial(basis(&sq, 3), &CoefficientLaw::ComplexGaussianStd, StreamKey::new(3, 3, 3));
    let moduli: Vec<f64> = (-20..=20).map(|k| (k as f64 * 0.1).exp()).collect();
    let pts = amoeba_sample(&f, &moduli, 16).unwrap();
    assert_eq!(pts.len(), moduli.len() * 16 * 3);
    // for |x| ≤ 2 the fibre roots stay in a bounded band
    assert!(pts.iter().all(|p| p[1].abs() < 20.0));
}

fn lp1(c: &[Complex64]) -> LaurentPolynomial {
    LaurentPolynomial::new(1, c.iter().enumerate().map(|(k, v)| (vec![k as i64], *v)).collect()).unwrap()
}

fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
        .prop_filter("nondegenerate ends", |v: &Vec<Complex64>| {
            v[0].norm() > 0.1 && v[v.len() - 1].norm() > 0.1
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn roots_of_product_are_union(a in coeffs(4), b in coeffs(3)) {
        let ra = roots_univariate_laurent(&lp1(&a)).unwrap();
        let rb = roots_univariate_laurent(&lp1(&b)).unwrap();
        let rab = roots_univariate_laurent(&lp1(&mul(&a, &b))).unwrap();
        // near-coincident roots of f and g are legitimately merged
        let mut all: Vec<Vec<Complex64>> = ra.points.clone();
        all.extend(rb.points.iter().cloned());
        let close = all.iter().enumerate().any(|(i, p)| all[i + 1..].iter().any(|q| chordal(p, q) < 1e-4));
        prop_assume!(!close);
        prop_assert_eq!(rab.len(), all.len());
        for p in &all {
            let d = rab.points.iter().map(|q| chordal(p, q)).fold(f64::INFINITY, f64::min);
            prop_assert!(d < 1e-6, "{:?} missing ({})", p, d);
        }
    }
}
