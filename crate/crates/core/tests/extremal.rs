use num_complex::Complex64;
use proptest::prelude::*;
use sparsezeros::extremal::{
    allowed_region, fs_potential_log, ma_density, ExtremalEvaluator, MaCase,
};
use sparsezeros::polytope::IntegralPolytope;

fn log_grid(k: usize, lo: f64, hi: f64) -> Vec<[f64; 2]> {
    let step = (hi - lo) / (k - 1) as f64;
    (0..k)
        .flat_map(|i| (0..k).map(move |j| [lo + i as f64 * step, lo + j as f64 * step]))
        .collect()
}

fn pairs() -> Vec<(IntegralPolytope, u32)> {
    vec![
        (IntegralPolytope::unit_cube(2).unwrap(), 2),
        (IntegralPolytope::unit_cube(2).unwrap(), 3),
        (IntegralPolytope::simplex(2).unwrap(), 1),
        (IntegralPolytope::trapezoid(5).unwrap(), 5),
        (IntegralPolytope::from_coords(&[&[1, 0], &[3, 1], &[1, 2]]).unwrap(), 4),
    ]
}

#[test]
fn dual_routes_agree() {
    for (poly, p) in pairs() {
        let mm = ExtremalEvaluator::FsMomentMap { polytope: poly.clone(), p };
        let ld = ExtremalEvaluator::FsLegendreDual { polytope: poly.clone(), p };
        for u in log_grid(20, -6.0, 6.0) {
            let a = mm.eval_log(&u).unwrap();
            let b = ld.eval_log(&u).unwrap();
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{poly:?} p={p} u={u:?}: {a} vs {b}");
        }
    }
}

#[test]
fn extremal_below_weight_and_in_lelong_class() {
    for (poly, p) in pairs() {
        let ev = ExtremalEvaluator::FsLegendreDual { polytope: poly.clone(), p };
        let mut consts = Vec::new();
        for k in [15usize, 29] {
            let mut c = f64::NEG_INFINITY;
            for u in log_grid(k, -8.0, 8.0) {
                let v = ev.eval_log(&u).unwrap();
                assert!(v <= fs_potential_log(&u, p as f64) + 1e-8);
                c = c.max(v - poly.support_function(&u));
            }
            consts.push(c);
        }
        // the constant C in V ≤ H_P + C does not grow under refinement
        assert!(consts[1] <= consts[0] + 1e-2, "{consts:?}");
    }
    let tc = ExtremalEvaluator::TorusClosedForm { polytope: IntegralPolytope::trapezoid(5).unwrap() };
    for k in 0..50 {
        let z = [Complex64::from_polar(1.0, k as f64), Complex64::from_polar(1.0, 2.0 * k as f64)];
        assert!(tc.eval(&z).unwrap().abs() <= 1e-12);
    }
}

#[test]
fn monotone_in_polytope() {
    let small = IntegralPolytope::from_coords(&[&[1, 1], &[2, 1], &[1, 2]]).unwrap();
    let big = IntegralPolytope::unit_cube(2).unwrap().dilate(2).unwrap();
    for (a, b) in [(small.clone(), big.clone()), (IntegralPolytope::unit_cube(2).unwrap(), big)] {
        for route in 0..2 {
            let mk = |poly: IntegralPolytope| {
                if route == 0 {
                    ExtremalEvaluator::FsMomentMap { polytope: poly, p: 5 }
                } else {
                    ExtremalEvaluator::FsLegendreDual { polytope: poly, p: 5 }
                }
            };
            let (ea, eb) = (mk(a.clone()), mk(b.clone()));
            for u in log_grid(15, -5.0, 5.0) {
                assert!(ea.eval_log(&u).unwrap() <= eb.eval_log(&u).unwrap() + 1e-9);
            }
        }
    }
}

#[test]
fn support_localization() {
    let sq = IntegralPolytope::unit_cube(2).unwrap();
    let mm = ExtremalEvaluator::FsMomentMap { polytope: sq.clone(), p: 2 };
    let ld = ExtremalEvaluator::FsLegendreDual { polytope: sq.clone(), p: 2 };
    let mut positive = 0;
    for u in log_grid(32, -3.0, 3.0).into_iter().take(1000) {
        let z = [Complex64::from_polar(u[0].exp(), 0.3), Complex64::from_polar(u[1].exp(), -1.1)];
        if ma_density(&MaCase::FsSquare, &z).unwrap() > 0.0 {
            positive += 1;
            assert!(allowed_region(&sq, 2, &z));
            let q = mm.weight(&z).unwrap();
            assert!((mm.eval(&z).unwrap() - q).abs() < 1e-8);
            assert!((ld.eval(&z).unwrap() - q).abs() < 1e-8);
        }
    }
    assert!(positive > 100);
}

#[test]
fn torus_angular_density_mass() {
    for ps in [
        vec![IntegralPolytope::unit_cube(2).unwrap(); 2],
        vec![IntegralPolytope::trapezoid(5).unwrap(); 2],
        vec![IntegralPolytope::unit_cube(2).unwrap(), IntegralPolytope::simplex(2).unwrap()],
    ] {
        let mv = sparsezeros::polytope::mixed_volume(&ps).unwrap().value;
        let case = MaCase::TorusAngular { polytopes: ps };
        let d = ma_density(&case, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let mass = d * (2.0 * std::f64::consts::PI).powi(2);
        assert!((mass - *mv.numer() as f64 / *mv.denom() as f64).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn dual_routes_agree_random(u1 in -12.0f64..12.0, u2 in -12.0f64..12.0, k in 0usize..5) {
        let (poly, p) = pairs()[k].clone();
        let a = ExtremalEvaluator::FsMomentMap { polytope: poly.clone(), p }.eval_log(&[u1, u2]).unwrap();
        let b = ExtremalEvaluator::FsLegendreDual { polytope: poly, p }.eval_log(&[u1, u2]).unwrap();
        prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{} vs {}", a, b);
    }
}
