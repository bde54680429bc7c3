//! Weighted extremal functions, moment maps and limit Monge–Ampère densities.
//!
//! Throughout, `u = Log z` and the Fubini–Study weight of degree `p` is
//! `q(u) = (p/2) log(1 + Σ e^{2u_i})`, whose gradient is the moment map
//! `μ_p`. Its Legendre conjugate on `pΣ` is
//! `q*(x) = ½[Σ x_i log x_i + (p - Σx) log(p - Σx) - p log p]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::OrthoBasis;
use crate::error::{Error, Result};
use crate::numeric::ln_factorial;
use crate::polytope::{log_moduli, mixed_volume, IntegralPolytope};

/// Margin for strict interior tests of the moment map image.
pub const ALLOWED_MARGIN: f64 = 1e-10;
/// Tolerance of the invariants checked on a moment fit.
pub const FIT_TOL: f64 = 1e-8;

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `μ_p` in logarithmic coordinates, stable for large `|u|`.
pub fn moment_map_log(u: &[f64], p: f64) -> Vec<f64> {
    let shift = u.iter().map(|v| 2.0 * v).fold(0.0, f64::max);
    let den = (-shift).exp() + u.iter().map(|v| (2.0 * v - shift).exp()).sum::<f64>();
    u.iter().map(|v| p * (2.0 * v - shift).exp() / den).collect()
}

/// `μ_p(z)_i = p |z_i|^2 / (1 + ||z||^2)`.
pub fn moment_map(z: &[Complex64], p: f64) -> Vec<f64> {
    let n2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if n2.is_finite() {
        z.iter().map(|c| p * c.norm_sqr() / (1.0 + n2)).collect()
    } else {
        let u: Vec<f64> = z.iter().map(|c| c.norm().ln()).collect();
        moment_map_log(&u, p)
    }
}

/// `q(u) = (p/2) log(1 + Σ e^{2u_i})`.
pub fn fs_potential_log(u: &[f64], p: f64) -> f64 {
    let shift = u.iter().map(|v| 2.0 * v).fold(0.0, f64::max);
    let s = (-shift).exp() + u.iter().map(|v| (2.0 * v - shift).exp()).sum::<f64>();
    0.5 * p * (shift + s.ln())
}

/// `q*(x)` with `0 log 0 = 0`; `+∞` outside `pΣ`.
pub fn fs_conjugate(x: &[f64], p: f64) -> f64 {
    let s: f64 = x.iter().sum();
    let rest = p - s;
    if x.iter().any(|&v| v < -1e-15) || rest < -1e-12 {
        return f64::INFINITY;
    }
    0.5 * (x.iter().map(|&v| xlogx(v)).sum::<f64>() + xlogx(rest.max(0.0)) - p * p.ln())
}

/// Whether `μ_p(z)` lies in the interior of `P` (margin `1e-10`).
pub fn allowed_region(p_poly: &IntegralPolytope, p: u32, z: &[Complex64]) -> bool {
    z.len() == p_poly.dim() && p_poly.contains_interior(&moment_map(z, p as f64), ALLOWED_MARGIN)
}

fn check_fs_pair(poly: &IntegralPolytope, p: u32) -> Result<()> {
    if poly.dim() > 2 {
        return Err(Error::UnsupportedDimension(poly.dim()));
    }
    if !poly.is_full() {
        return Err(Error::InvalidArgument(
            "polytope must be full-dimensional".into(),
        ));
    }
    if !poly.in_positive_orthant() || poly.max_degree() > p as i64 || p == 0 {
        return Err(Error::InvalidWeightedSet(format!(
            "polytope is not contained in {p}Σ"
        )));
    }
    Ok(())
}

/// Solution `(τ_z, r(z))` of `μ_p(e^{-τ/2}·z) = r`, `r ∈ P`, `τ ∈ C_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFit {
    pub tau: Vec<f64>,
    pub r: Vec<f64>,
    pub residual: f64,
}

impl MomentFit {
    fn shifted(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.tau).map(|(a, t)| a - 0.5 * t).collect()
    }
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Accepts a candidate fit if it satisfies all invariants.
fn accept(poly: &IntegralPolytope, p: f64, u: &[f64], tau: Vec<f64>, r: Vec<f64>) -> Option<MomentFit> {
    if !poly.contains(&r, FIT_TOL) || !tau.iter().all(|t| t.is_finite()) {
        return None;
    }
    if !poly.in_normal_cone(&r, &tau).unwrap_or(false) {
        return None;
    }
    let shifted: Vec<f64> = u.iter().zip(&tau).map(|(a, t)| a - 0.5 * t).collect();
    let residual = norm_diff(&moment_map_log(&shifted, p), &r);
    (residual < FIT_TOL).then_some(MomentFit { tau, r, residual })
}

/// Moment fit in logarithmic coordinates. Faces are visited from the
/// interior down to the vertices.
pub fn moment_fit_log(poly: &IntegralPolytope, p: u32, u: &[f64]) -> Result<MomentFit> {
    check_fs_pair(poly, p)?;
    let m = poly.dim();
    if u.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: u.len(),
        });
    }
    let pf = p as f64;
    let mu = moment_map_log(u, pf);
    if poly.contains(&mu, 0.0) {
        return Ok(MomentFit {
            tau: vec![0.0; m],
            r: mu,
            residual: 0.0,
        });
    }
    let mut best = f64::INFINITY;
    // facets: τ = t n with t ≥ 0, solve <n, μ(u - t n / 2)> = h
    for facet in poly.facets() {
        let n: Vec<f64> = facet.normal.iter().map(|&v| v as f64).collect();
        let h = facet.offset as f64;
        let g = |t: f64| {
            let shifted: Vec<f64> = u.iter().zip(&n).map(|(a, b)| a - 0.5 * t * b).collect();
            crate::polytope::dot(&n, &moment_map_log(&shifted, pf)) - h
        };
        if g(0.0) <= 0.0 {
            continue;
        }
        let mut hi = 1.0;
        while g(hi) > 0.0 && hi < 1e8 {
            hi *= 2.0;
        }
        if g(hi) > 0.0 {
            continue;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        let t = 0.5 * (lo + hi);
        let tau: Vec<f64> = n.iter().map(|b| t * b).collect();
        let shifted: Vec<f64> = u.iter().zip(&tau).map(|(a, b)| a - 0.5 * b).collect();
        let r = moment_map_log(&shifted, pf);
        best = best.min(g(t).abs());
        if let Some(fit) = accept(poly, pf, u, tau, r) {
            return Ok(fit);
        }
    }
    // vertices: r = v, u' = ∇q*(v)
    for v in poly.vertices() {
        let x = v.to_f64();
        let rest = pf - x.iter().sum::<f64>();
        if rest <= 0.0 || x.iter().any(|&c| c <= 0.0) {
            continue;
        }
        let tau: Vec<f64> = u
            .iter()
            .zip(&x)
            .map(|(a, c)| 2.0 * a - (c / rest).ln())
            .collect();
        if let Some(fit) = accept(poly, pf, u, tau, x) {
            return Ok(fit);
        }
    }
    Err(Error::MomentFit(best))
}

pub fn moment_fit(poly: &IntegralPolytope, p: u32, z: &[Complex64]) -> Result<MomentFit> {
    moment_fit_log(poly, p, &log_moduli(z)?)
}

/// Maximizer and value of `<x, u> - q*(x)` over the segment `[a, b]`.
fn segment_max(a: &[f64], b: &[f64], u: &[f64], p: f64) -> (Vec<f64>, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let dsum: f64 = d.iter().sum();
    let at = |s: f64| -> Vec<f64> { a.iter().zip(&d).map(|(x, e)| x + s * e).collect() };
    // derivative along the segment, decreasing in s
    let slope = |s: f64| {
        let x = at(s);
        let mut v = 0.0;
        for i in 0..x.len() {
            if d[i] != 0.0 {
                v += d[i] * (u[i] - 0.5 * x[i].ln());
            }
        }
        if dsum != 0.0 {
            v += 0.5 * dsum * (p - x.iter().sum::<f64>()).ln();
        }
        v
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let sl = slope(mid);
        if sl > 0.0 {
            lo = mid;
        } else if sl < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    let x = at(0.5 * (lo + hi));
    let val = crate::polytope::dot(&x, u) - fs_conjugate(&x, p);
    (x, val)
}

/// `sup_{x ∈ P} [<x, u> - q*(x)]` and its maximizer.
pub fn legendre_dual_log(poly: &IntegralPolytope, p: u32, u: &[f64]) -> Result<(Vec<f64>, f64)> {
    check_fs_pair(poly, p)?;
    let pf = p as f64;
    let mu = moment_map_log(u, pf);
    // the unconstrained maximizer of the strictly concave objective is μ_p(u)
    if poly.contains(&mu, 0.0) {
        return Ok((mu, fs_potential_log(u, pf)));
    }
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for facet in poly.facets() {
        let (a, b) = match facet.vertices.as_slice() {
            [v] => (v.to_f64(), v.to_f64()),
            [v, w, ..] => (v.to_f64(), w.to_f64()),
            [] => continue,
        };
        let cand = segment_max(&a, &b, u, pf);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// How `V_{P,K,q}` is evaluated.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ExtremalEvaluator {
    /// `K = (S^1)^m`, `q = 0`: `V = H_P`.
    TorusClosedForm { polytope: IntegralPolytope },
    /// Fubini–Study weight via the moment fit.
    FsMomentMap { polytope: IntegralPolytope, p: u32 },
    /// Fubini–Study weight via the Legendre dual.
    FsLegendreDual { polytope: IntegralPolytope, p: u32 },
}

impl ExtremalEvaluator {
    pub fn polytope(&self) -> &IntegralPolytope {
        match self {
            ExtremalEvaluator::TorusClosedForm { polytope }
            | ExtremalEvaluator::FsMomentMap { polytope, .. }
            | ExtremalEvaluator::FsLegendreDual { polytope, .. } => polytope,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExtremalEvaluator::TorusClosedForm { .. } => Ok(()),
            ExtremalEvaluator::FsMomentMap { polytope, p }
            | ExtremalEvaluator::FsLegendreDual { polytope, p } => check_fs_pair(polytope, *p),
        }
    }

    /// The weight `q` of the weighted set.
    pub fn weight(&self, z: &[Complex64]) -> Result<f64> {
        match self {
            ExtremalEvaluator::TorusClosedForm { .. } => Ok(0.0),
            ExtremalEvaluator::FsMomentMap { p, .. } | ExtremalEvaluator::FsLegendreDual { p, .. } => {
                Ok(fs_potential_log(&log_moduli(z)?, *p as f64))
            }
        }
    }

    pub fn eval_log(&self, u: &[f64]) -> Result<f64> {
        match self {
            ExtremalEvaluator::TorusClosedForm { polytope } => {
                if u.len() != polytope.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: polytope.dim(),
                        got: u.len(),
                    });
                }
                Ok(polytope.support_function(u))
            }
            ExtremalEvaluator::FsMomentMap { polytope, p } => {
                let fit = moment_fit_log(polytope, *p, u)?;
                let shifted = fit.shifted(u);
                Ok(0.5 * crate::polytope::dot(&fit.r, &fit.tau)
                    + fs_potential_log(&shifted, *p as f64))
            }
            ExtremalEvaluator::FsLegendreDual { polytope, p } => {
                Ok(legendre_dual_log(polytope, *p, u)?.1)
            }
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<f64> {
        self.eval_log(&log_moduli(z)?)
    }
}

pub fn v_extremal(evaluator: &ExtremalEvaluator, z: &[Complex64]) -> Result<f64> {
    evaluator.eval(z)
}

/// Limit Monge–Ampère densities with closed forms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum MaCase {
    /// `P = [0,1]^2`, `p = 2`.
    FsSquare,
    /// General Fubini–Study case `(P, p)`.
    FubiniStudy { polytope: IntegralPolytope, p: u32 },
    /// `K = (S^1)^m`: constant `MV/(2π)^m` against `dθ` on the unit torus.
    TorusAngular { polytopes: Vec<IntegralPolytope> },
}

impl MaCase {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "FSSquare" | "fs-square" => Ok(MaCase::FsSquare),
            "TorusAngularSquare" | "torus-square" => {
                let sq = IntegralPolytope::unit_cube(2)?;
                Ok(MaCase::TorusAngular {
                    polytopes: vec![sq.clone(), sq],
                })
            }
            other => Err(Error::InvalidArgument(format!("unknown density case {other:?}"))),
        }
    }

    fn fs_pair(&self) -> Result<Option<(IntegralPolytope, u32)>> {
        Ok(match self {
            MaCase::FsSquare => Some((IntegralPolytope::unit_cube(2)?, 2)),
            MaCase::FubiniStudy { polytope, p } => Some((polytope.clone(), *p)),
            MaCase::TorusAngular { .. } => None,
        })
    }
}

/// Density of `MA(V_{P,K,q})`.
///
/// Fubini–Study cases: `p^m m! / (π^m (1 + ||z||^2)^{m+1})` on the allowed
/// region, against Lebesgue measure on `C^m`; its total mass is
/// `m! Vol(P) = MV(P, …, P)`. Torus case: `MV / (2π)^m` against
/// `dθ_1 … dθ_m` at points of the unit torus, `0` elsewhere.
pub fn ma_density(case: &MaCase, z: &[Complex64]) -> Result<f64> {
    if let Some((poly, p)) = case.fs_pair()? {
        check_fs_pair(&poly, p)?;
        let m = poly.dim();
        if z.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: z.len(),
            });
        }
        if !allowed_region(&poly, p, z) {
            return Ok(0.0);
        }
        let n2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let c = (p as f64).powi(m as i32) * ln_factorial(m as u64).exp() / PI.powi(m as i32);
        return Ok(c / (1.0 + n2).powi(m as i32 + 1));
    }
    let MaCase::TorusAngular { polytopes } = case else {
        unreachable!()
    };
    let mv = mixed_volume(polytopes)?.value;
    let m = polytopes[0].dim();
    if z.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: z.len(),
        });
    }
    if z.iter().any(|c| (c.norm() - 1.0).abs() > 1e-9) {
        return Ok(0.0);
    }
    Ok(*mv.numer() as f64 / *mv.denom() as f64 / (2.0 * PI).powi(m as i32))
}

/// Sup-norm error of `ρ_N = (1/2N) log S_N` against `V` over a grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    #[serde(rename = "Ns")]
    pub ns: Vec<u32>,
    pub errors: Vec<f64>,
    pub grid_spec: String,
    pub grid_size: usize,
    /// Least-squares slope of `log e(N)` against `log N`.
    pub decay_exponent: f64,
    /// `e(N_last) < e(N_first)`.
    pub monotone_trend: bool,
    pub strictly_decreasing: bool,
}

pub fn bergman_convergence(
    family: &dyn Fn(u32) -> Result<OrthoBasis>,
    evaluator: &ExtremalEvaluator,
    grid: &[Vec<Complex64>],
    ns: &[u32],
    grid_spec: &str,
) -> Result<ConvergenceReport> {
    if grid.is_empty() || ns.is_empty() {
        return Err(Error::EmptyInput);
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("degrees must be increasing".into()));
    }
    let v: Vec<f64> = grid.iter().map(|z| evaluator.eval(z)).collect::<Result<_>>()?;
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let basis = family(n)?;
        let mut e: f64 = 0.0;
        for (z, vz) in grid.iter().zip(&v) {
            e = e.max((basis.bergman_diag(z)?.rho - vz).abs());
        }
        errors.push(e);
    }
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(&errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    let decay_exponent = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(ConvergenceReport {
        ns: ns.to_vec(),
        monotone_trend: errors.last() < errors.first(),
        strictly_decreasing: errors.windows(2).all(|w| w[1] < w[0]),
        errors,
        grid_spec: grid_spec.to_string(),
        grid_size: grid.len(),
        decay_exponent,
    })
}
