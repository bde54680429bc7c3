//! Empirical zero measures and their comparison with limit densities.
//!
//! All regions are Reinhardt (membership depends only on the moduli
//! `|z_i|`). Predicted masses are integrated in `t_i = |z_i|^2`, where the
//! Lebesgue measure of `C^m` becomes `π^m dt` after the angular
//! integration, and each region reports the exact locations at which its
//! indicator can jump in the last coordinate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Coefficients, OrthoBasis};
use crate::error::{Error, Result};
use crate::extremal::{MaCase, ALLOWED_MARGIN};
use crate::numeric::{
    integrate, integrate_half_line, ks_pvalue, ks_statistic, ln_factorial, mean_and_sem,
    CompensatedSum,
};
use crate::polytope::{mixed_volume, IntegralPolytope};
use crate::solver::ZeroSet;

/// Log-coordinate range to which histograms are clipped.
pub const LOG_CLIP: f64 = 10.0;

/// Zeros pooled over `trials` independent systems, each point carrying
/// weight `1 / (N^k trials)`; for a single trial this is `N^{-k}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub m: usize,
    pub k: usize,
    pub n: u32,
    pub trials: usize,
    pub points: Vec<Vec<Complex64>>,
    /// Number of points contributed by each trial.
    pub per_trial: Vec<usize>,
}

impl EmpiricalMeasure {
    pub fn new(m: usize, k: usize, n: u32) -> Self {
        EmpiricalMeasure {
            m,
            k,
            n,
            ..Default::default()
        }
    }

    /// Appends the points of one trial.
    pub fn add_trial(&mut self, points: impl IntoIterator<Item = Vec<Complex64>>) {
        let before = self.points.len();
        self.points.extend(points);
        self.per_trial.push(self.points.len() - before);
        self.trials += 1;
    }

    pub fn from_zero_sets(sets: &[ZeroSet], k: usize, n: u32) -> Self {
        let m = sets.first().map_or(k, |s| s.m);
        let mut me = Self::new(m, k, n);
        for s in sets {
            me.add_trial(s.points.iter().cloned());
        }
        me
    }

    pub fn weight(&self) -> f64 {
        1.0 / ((self.n as f64).powi(self.k as i32) * self.trials.max(1) as f64)
    }

    pub fn total_mass(&self) -> f64 {
        self.points.len() as f64 * self.weight()
    }

    /// Per-trial masses of `region`, in trial order.
    pub fn trial_masses(&self, region: &RegionSpec) -> Vec<f64> {
        let scale = (self.n as f64).powi(self.k as i32);
        let mut out = Vec::with_capacity(self.trials);
        let mut start = 0;
        for &len in &self.per_trial {
            let c = self.points[start..start + len]
                .iter()
                .filter(|z| region.contains(z))
                .count();
            out.push(c as f64 / scale);
            start += len;
        }
        out
    }
}

/// Reinhardt region in `(C*)^m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RegionSpec {
    All,
    /// `ρ < |z_i| < R` for every `i`.
    Annulus { rho: f64, big_r: f64 },
    /// `lo < |z_coord| < hi`.
    ModulusBand { coord: usize, lo: f64, hi: f64 },
    /// `<normal, Log z> < offset`.
    LogHalfSpace { normal: Vec<f64>, offset: f64 },
    /// `||z|| < radius`.
    Ball { radius: f64 },
    /// Cells of a regular grid on the box `[lo, hi]` in `Log` coordinates;
    /// `mask` is row-major with the last coordinate fastest.
    IndicatorGrid {
        lo: Vec<f64>,
        hi: Vec<f64>,
        cells: Vec<usize>,
        mask: Vec<bool>,
    },
    /// Classically allowed region `μ_p^{-1}(P°)`.
    Allowed { polytope: IntegralPolytope, p: u32 },
    Intersection { parts: Vec<RegionSpec> },
}

impl RegionSpec {
    pub fn contains(&self, z: &[Complex64]) -> bool {
        let t: Vec<f64> = z.iter().map(|c| c.norm_sqr()).collect();
        self.contains_t(&t)
    }

    /// Membership in terms of `t_i = |z_i|^2`.
    pub fn contains_t(&self, t: &[f64]) -> bool {
        match self {
            RegionSpec::All => true,
            RegionSpec::Annulus { rho, big_r } => {
                t.iter().all(|&v| rho * rho < v && v < big_r * big_r)
            }
            RegionSpec::ModulusBand { coord, lo, hi } => {
                t.get(*coord).is_some_and(|&v| lo * lo < v && v < hi * hi)
            }
            RegionSpec::LogHalfSpace { normal, offset } => {
                let s: f64 = normal.iter().zip(t).map(|(a, v)| 0.5 * a * v.ln()).sum();
                s < *offset
            }
            RegionSpec::Ball { radius } => t.iter().sum::<f64>() < radius * radius,
            RegionSpec::IndicatorGrid { lo, hi, cells, mask } => {
                let mut idx = 0;
                for i in 0..t.len() {
                    let x = 0.5 * t[i].ln();
                    if !(x >= lo[i] && x < hi[i]) {
                        return false;
                    }
                    let c = (((x - lo[i]) / (hi[i] - lo[i])) * cells[i] as f64) as usize;
                    idx = idx * cells[i] + c.min(cells[i] - 1);
                }
                mask[idx]
            }
            RegionSpec::Allowed { polytope, p } => {
                let s: f64 = t.iter().sum();
                let mu: Vec<f64> = t.iter().map(|v| *p as f64 * v / (1.0 + s)).collect();
                polytope.contains_interior(&mu, ALLOWED_MARGIN)
            }
            RegionSpec::Intersection { parts } => parts.iter().all(|r| r.contains_t(t)),
        }
    }

    /// Values of the last coordinate `t_m` (given `t_1..t_{m-1}`) where
    /// the indicator may change.
    pub fn breakpoints(&self, prefix: &[f64]) -> Vec<f64> {
        let last = prefix.len();
        match self {
            RegionSpec::All => vec![],
            RegionSpec::Annulus { rho, big_r } => vec![rho * rho, big_r * big_r],
            RegionSpec::ModulusBand { coord, lo, hi } => {
                if *coord == last {
                    vec![lo * lo, hi * hi]
                } else {
                    vec![]
                }
            }
            RegionSpec::LogHalfSpace { normal, offset } => {
                let a = normal[last];
                if a == 0.0 {
                    return vec![];
                }
                let s: f64 = normal.iter().zip(prefix).map(|(n, v)| n * v.ln()).sum();
                vec![((2.0 * offset - s) / a).exp()]
            }
            RegionSpec::Ball { radius } => vec![radius * radius - prefix.iter().sum::<f64>()],
            RegionSpec::IndicatorGrid { lo, hi, cells, .. } => (0..=cells[last])
                .map(|c| {
                    let x = lo[last] + (hi[last] - lo[last]) * c as f64 / cells[last] as f64;
                    (2.0 * x).exp()
                })
                .collect(),
            RegionSpec::Allowed { polytope, p } => {
                // <n, p t> = h (1 + Σ t) is linear in t
                let pf = *p as f64;
                polytope
                    .facets()
                    .iter()
                    .filter_map(|f| {
                        let h = f.offset as f64;
                        let a = pf * f.normal[last] as f64 - h;
                        if a == 0.0 {
                            return None;
                        }
                        let rest: f64 = prefix
                            .iter()
                            .zip(&f.normal)
                            .map(|(t, n)| (pf * *n as f64 - h) * t)
                            .sum();
                        Some((h - rest) / a)
                    })
                    .collect()
            }
            RegionSpec::Intersection { parts } => {
                parts.iter().flat_map(|r| r.breakpoints(prefix)).collect()
            }
        }
    }
}

/// Weighted count of the points of `measure` in `region`.
pub fn region_mass(measure: &EmpiricalMeasure, region: &RegionSpec) -> f64 {
    let c = measure.points.iter().filter(|z| region.contains(z)).count();
    c as f64 * measure.weight()
}

/// Mean per-trial mass with its Monte Carlo standard error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MassEstimate {
    pub mean: f64,
    pub sem: f64,
    pub trials: usize,
}

pub fn region_mass_estimate(measure: &EmpiricalMeasure, region: &RegionSpec) -> MassEstimate {
    let masses = measure.trial_masses(region);
    let (mean, sem) = mean_and_sem(&masses);
    MassEstimate {
        mean,
        sem,
        trials: masses.len(),
    }
}

const QUAD_ABS: f64 = 1e-11;
const QUAD_REL: f64 = 1e-10;

/// `∫ f(t) 1_R(prefix, t) dt` over `t ∈ [0, ∞)`, split at the breakpoints.
fn integrate_last<F: Fn(&[f64]) -> f64>(f: &F, region: &RegionSpec, prefix: &[f64]) -> f64 {
    let mut br: Vec<f64> = region
        .breakpoints(prefix)
        .into_iter()
        .filter(|b| b.is_finite() && *b > 0.0)
        .collect();
    br.sort_by(f64::total_cmp);
    br.dedup();
    let mut t = prefix.to_vec();
    t.push(0.0);
    let mut total = CompensatedSum::default();
    let mut lo = 0.0;
    for &hi in br.iter().chain(std::iter::once(&f64::INFINITY)) {
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo + 1.0 };
        t[prefix.len()] = mid;
        if region.contains_t(&t) {
            let g = |x: f64| {
                let mut tt = prefix.to_vec();
                tt.push(x);
                f(&tt)
            };
            let v = if hi.is_finite() {
                integrate(g, lo, hi, QUAD_ABS, QUAD_REL)
            } else {
                integrate_half_line(|s| g(lo + s), QUAD_ABS, QUAD_REL)
            };
            total.add(v);
        }
        lo = hi;
    }
    total.value()
}

/// `∫_R ρ(z) dz` for a Reinhardt density `ρ` given in `t` coordinates.
fn integrate_reinhardt<F: Fn(&[f64]) -> f64>(density: &F, region: &RegionSpec, m: usize) -> Result<f64> {
    let ang = PI.powi(m as i32);
    match m {
        1 => Ok(ang * integrate_last(density, region, &[])),
        2 => Ok(ang
            * integrate_half_line(
                |t1| integrate_last(density, region, &[t1]),
                QUAD_ABS,
                QUAD_REL,
            )),
        _ => Err(Error::UnsupportedDimension(m)),
    }
}

/// Limit mass `∫_R MA(V)` for a density case with closed form.
pub fn predicted_mass(case: &MaCase, region: &RegionSpec) -> Result<f64> {
    let (poly, p) = match case {
        MaCase::FsSquare => (IntegralPolytope::unit_cube(2)?, 2),
        MaCase::FubiniStudy { polytope, p } => (polytope.clone(), *p),
        MaCase::TorusAngular { polytopes } => {
            let mv = mixed_volume(polytopes)?.value;
            let m = polytopes[0].dim();
            return Ok(if region.contains_t(&vec![1.0; m]) {
                *mv.numer() as f64 / *mv.denom() as f64
            } else {
                0.0
            });
        }
    };
    // validates (P, p)
    crate::extremal::ma_density(&MaCase::FubiniStudy { polytope: poly.clone(), p }, &vec![Complex64::new(1.0, 0.0); poly.dim()])?;
    let m = poly.dim();
    let c = (p as f64).powi(m as i32) * ln_factorial(m as u64).exp() / PI.powi(m as i32);
    let density = move |t: &[f64]| c / (1.0 + t.iter().sum::<f64>()).powi(m as i32 + 1);
    let full = RegionSpec::Intersection {
        parts: vec![region.clone(), RegionSpec::Allowed { polytope: poly, p }],
    };
    integrate_reinhardt(&density, &full, m)
}

/// `∫_R ρ dz` for an arbitrary Reinhardt density in `t` coordinates.
pub fn reinhardt_integral(density: &dyn Fn(&[f64]) -> f64, region: &RegionSpec, m: usize) -> Result<f64> {
    integrate_reinhardt(&density, region, m)
}

/// Exact expected zero mass in `region` (normalized by `N^m`) of a system
/// of `m` independent complex Gaussian polynomials in the same diagonal
/// basis. The expected zero current is `(dd^c ψ)^m` with
/// `ψ = log S_N(z, z) / (2N)`; in log coordinates its density is
/// `m! det Hess ψ`, and `Hess ψ = (2/N) Cov_w(α)` for the weights
/// `w_α ∝ c_α^2 t^α`.
pub fn gaussian_expected_mass(basis: &OrthoBasis, region: &RegionSpec) -> Result<f64> {
    let Coefficients::Diagonal(c) = &basis.coeff else {
        return Err(Error::InvalidArgument(
            "finite-N expectation needs a monomial (diagonal) basis".into(),
        ));
    };
    let m = basis.m;
    let n = basis.n as f64;
    let log_c2: Vec<f64> = c.iter().map(|v| 2.0 * v.abs().ln()).collect();
    let exps: Vec<Vec<f64>> = basis.exponents.iter().map(|e| e.to_f64()).collect();
    let fact = ln_factorial(m as u64).exp();
    let density = |t: &[f64]| -> f64 {
        let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let lw: Vec<f64> = exps
            .iter()
            .zip(&log_c2)
            .map(|(a, l)| l + a.iter().zip(&lt).map(|(x, y)| x * y).sum::<f64>())
            .collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = lw.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let mean: Vec<f64> = (0..m)
            .map(|i| exps.iter().zip(&w).map(|(a, w)| w * a[i]).sum::<f64>() / total)
            .collect();
        let cov = |i: usize, j: usize| {
            exps.iter()
                .zip(&w)
                .map(|(a, w)| w * (a[i] - mean[i]) * (a[j] - mean[j]))
                .sum::<f64>()
                / total
                * 2.0
                / n
        };
        let det = match m {
            1 => cov(0, 0),
            _ => cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1),
        };
        let jac: f64 = t.iter().map(|v| 2.0 * v).product();
        fact * det / (jac * PI.powi(m as i32))
    };
    integrate_reinhardt(&density, region, m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram1D {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Points outside the range.
    pub outside: usize,
}

impl Histogram1D {
    pub fn new(values: impl IntoIterator<Item = f64>, bins: usize, lo: f64, hi: f64) -> Self {
        let edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        let mut counts = vec![0; bins];
        let mut outside = 0;
        for v in values {
            if v >= lo && v < hi {
                let i = (((v - lo) / (hi - lo)) * bins as f64) as usize;
                counts[i.min(bins - 1)] += 1;
            } else {
                outside += 1;
            }
        }
        Histogram1D {
            edges,
            counts,
            outside,
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Center of the fullest bin.
    pub fn mode(&self) -> f64 {
        let (i, _) = self
            .counts
            .iter()
            .enumerate()
            .max_by_key(|(i, c)| (**c, std::cmp::Reverse(*i)))
            .unwrap();
        self.centers()[i]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AngularReport {
    pub points: usize,
    /// Per-coordinate KS statistic of `arg z_i` against the uniform law.
    pub ks_statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Per-coordinate histogram of `log|z_i|`.
    pub radial_profiles: Vec<Histogram1D>,
}

/// Radial profile bins: width 0.1 on `[-2.05, 2.05]`, centred on 0.
const RADIAL_BINS: usize = 41;
const RADIAL_HALF: f64 = 2.05;

pub fn angular_uniformity(measure: &EmpiricalMeasure) -> Result<AngularReport> {
    if measure.points.len() < 20 {
        return Err(Error::InvalidArgument(format!(
            "angular statistics need at least 20 points, got {}",
            measure.points.len()
        )));
    }
    let n = measure.points.len();
    let mut ks_statistics = Vec::new();
    let mut p_values = Vec::new();
    let mut radial_profiles = Vec::new();
    for i in 0..measure.m {
        let angles: Vec<f64> = measure
            .points
            .iter()
            .map(|z| (z[i].arg() + PI) / (2.0 * PI))
            .collect();
        let d = ks_statistic(&angles, |x| x.clamp(0.0, 1.0));
        ks_statistics.push(d);
        p_values.push(ks_pvalue(d, n));
        radial_profiles.push(Histogram1D::new(
            measure.points.iter().map(|z| z[i].norm().ln()),
            RADIAL_BINS,
            -RADIAL_HALF,
            RADIAL_HALF,
        ));
    }
    Ok(AngularReport {
        points: n,
        ks_statistics,
        p_values,
        radial_profiles,
    })
}

/// Fraction of zeros with `||z| - 1| < eps` (univariate measures).
pub fn kac_concentration(measure: &EmpiricalMeasure, eps: f64) -> Result<f64> {
    if measure.m != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: measure.m,
        });
    }
    if measure.points.is_empty() {
        return Ok(0.0);
    }
    let near = measure
        .points
        .iter()
        .filter(|z| (z[0].norm() - 1.0).abs() < eps)
        .count();
    Ok(near as f64 / measure.points.len() as f64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram2D {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major, `counts[i * ny + j]` for x-bin `i`, y-bin `j`.
    pub counts: Vec<usize>,
    pub outside: usize,
}

impl Histogram2D {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            0.5 * (self.x_edges[i] + self.x_edges[i + 1]),
            0.5 * (self.y_edges[j] + self.y_edges[j + 1]),
        )
    }
}

fn axis_range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let (lo, hi) = (lo.max(-LOG_CLIP), hi.min(LOG_CLIP));
    if hi - lo < 1e-12 {
        (lo - 0.5, lo + 0.5)
    } else {
        // widen slightly so the maximum falls inside the last bin
        (lo, hi + 1e-9 * (hi - lo))
    }
}

/// Histogram of `Log z` over an automatic range clipped to `[-10, 10]^2`.
pub fn logmap_histogram(measure: &EmpiricalMeasure, bins: usize) -> Result<Histogram2D> {
    if measure.m != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: measure.m,
        });
    }
    let logs: Vec<(f64, f64)> = measure
        .points
        .iter()
        .map(|z| (z[0].norm().ln(), z[1].norm().ln()))
        .collect();
    let xr = axis_range(logs.iter().map(|p| p.0));
    let yr = axis_range(logs.iter().map(|p| p.1));
    Ok(logmap_histogram_in(&logs, bins, xr, yr))
}

pub fn logmap_histogram_in(
    logs: &[(f64, f64)],
    bins: usize,
    xr: (f64, f64),
    yr: (f64, f64),
) -> Histogram2D {
    let edges = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect()
    };
    let mut counts = vec![0; bins * bins];
    let mut outside = 0;
    for &(x, y) in logs {
        if x >= xr.0 && x < xr.1 && y >= yr.0 && y < yr.1 {
            let i = (((x - xr.0) / (xr.1 - xr.0)) * bins as f64) as usize;
            let j = (((y - yr.0) / (yr.1 - yr.0)) * bins as f64) as usize;
            counts[i.min(bins - 1) * bins + j.min(bins - 1)] += 1;
        } else {
            outside += 1;
        }
    }
    Histogram2D {
        x_edges: edges(xr),
        y_edges: edges(yr),
        counts,
        outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn square_allowed() -> RegionSpec {
        RegionSpec::Allowed {
            polytope: IntegralPolytope::unit_cube(2).unwrap(),
            p: 2,
        }
    }

    #[test]
    fn region_mass_trivial() {
        let empty = EmpiricalMeasure::new(2, 2, 3);
        assert_eq!(region_mass(&empty, &RegionSpec::All), 0.0);
        let mut me = EmpiricalMeasure::new(2, 2, 2);
        me.add_trial(vec![vec![c(1.0), c(1.0)], vec![c(0.5), c(2.0)]]);
        assert_eq!(region_mass(&me, &RegionSpec::All), me.total_mass());
        assert_eq!(me.total_mass(), 0.5);
        let ball = RegionSpec::Ball { radius: 2.0 };
        assert_eq!(region_mass(&me, &ball), 0.25);
    }

    #[test]
    fn region_membership() {
        let a = RegionSpec::Annulus { rho: 0.5, big_r: 2.0 };
        assert!(a.contains(&[c(1.0), c(-1.5)]));
        assert!(!a.contains(&[c(1.0), c(0.4)]));
        let h = RegionSpec::LogHalfSpace { normal: vec![1.0, 1.0], offset: 0.0 };
        assert!(h.contains(&[c(0.5), c(1.5)]));
        assert!(!h.contains(&[c(2.0), c(1.0)]));
        let g = RegionSpec::IndicatorGrid {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
            cells: vec![2, 2],
            mask: vec![true, false, false, false],
        };
        assert!(g.contains(&[c(0.5), c(0.5)]));
        assert!(!g.contains(&[c(0.5), c(2.0)]));
        assert!(!g.contains(&[c(5.0), c(0.5)]));
        assert!(square_allowed().contains(&[c(1.0), c(1.0)]));
        assert!(!square_allowed().contains(&[c(10.0), c(0.1)]));
    }

    #[test]
    fn predicted_mass_identities() {
        let m = predicted_mass(&MaCase::FsSquare, &RegionSpec::All).unwrap();
        assert!((m - 2.0).abs() < 1e-7, "{m}");
        // nowhere allowed: |z_2|^2 < |z_1|^2 - 1 forced by the band
        let none = RegionSpec::Intersection {
            parts: vec![
                RegionSpec::ModulusBand { coord: 0, lo: 5.0, hi: 6.0 },
                RegionSpec::ModulusBand { coord: 1, lo: 0.1, hi: 1.0 },
            ],
        };
        assert_eq!(predicted_mass(&MaCase::FsSquare, &none).unwrap(), 0.0);
        let torus = MaCase::from_name("torus-square").unwrap();
        assert_eq!(predicted_mass(&torus, &RegionSpec::All).unwrap(), 2.0);
        let off = RegionSpec::Annulus { rho: 1.5, big_r: 3.0 };
        assert_eq!(predicted_mass(&torus, &off).unwrap(), 0.0);
        // one variable: P = [0, 1], p = 2, mass 1 on |z| < 1
        let seg = MaCase::FubiniStudy { polytope: IntegralPolytope::interval(0, 1).unwrap(), p: 2 };
        assert!((predicted_mass(&seg, &RegionSpec::All).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn predicted_mass_ball_closed_form() {
        // ∫ 8/(1+s)^3 min(1, s) over s < 9: 8[1/8 + 1/8 - 1/200]
        let r = RegionSpec::Ball { radius: 3.0 };
        let m = predicted_mass(&MaCase::FsSquare, &r).unwrap();
        assert!((m - 8.0 * (0.25 - 0.005)).abs() < 1e-8, "{m}");
    }

    #[test]
    fn predicted_mass_is_additive() {
        let inner = RegionSpec::Ball { radius: 1.7 };
        let outer = RegionSpec::Intersection {
            parts: vec![
                RegionSpec::Ball { radius: 3.0 },
                RegionSpec::LogHalfSpace { normal: vec![-1.0, -1.0], offset: -(1.7f64.ln()) },
            ],
        };
        let shell_lo = RegionSpec::Intersection {
            parts: vec![
                RegionSpec::Ball { radius: 3.0 },
                RegionSpec::LogHalfSpace { normal: vec![1.0, 1.0], offset: 1.7f64.ln() },
            ],
        };
        let a = predicted_mass(&MaCase::FsSquare, &outer).unwrap();
        let b = predicted_mass(&MaCase::FsSquare, &shell_lo).unwrap();
        let whole = predicted_mass(&MaCase::FsSquare, &RegionSpec::Ball { radius: 3.0 }).unwrap();
        assert!((a + b - whole).abs() < 1e-8);
        assert!(predicted_mass(&MaCase::FsSquare, &inner).unwrap() < whole);
    }

    #[test]
    fn gaussian_expectation_totals() {
        let sq = IntegralPolytope::unit_cube(2).unwrap();
        let b = crate::basis::fs_basis(&sq, 3, 2).unwrap();
        let all = gaussian_expected_mass(&b, &RegionSpec::All).unwrap();
        assert!((all - 2.0).abs() < 1e-7, "{all}");
        // Kac: E #{|z| < 1} = N/2 by z -> 1/z symmetry
        let seg = IntegralPolytope::interval(0, 1).unwrap();
        let b = crate::basis::torus_basis(&seg, 7).unwrap();
        let disc = RegionSpec::ModulusBand { coord: 0, lo: 0.0, hi: 1.0 };
        let v = gaussian_expected_mass(&b, &disc).unwrap();
        assert!((v - 0.5).abs() < 1e-8, "{v}");
    }

    #[test]
    fn angular_statistics() {
        let mut me = EmpiricalMeasure::new(1, 1, 10);
        me.add_trial((0..100).map(|_| vec![Complex64::from_polar(1.0, 0.3)]));
        let rep = angular_uniformity(&me).unwrap();
        assert!(rep.ks_statistics[0] > 0.5);
        assert!((rep.radial_profiles[0].mode()).abs() < 1e-12);
        let mut few = EmpiricalMeasure::new(1, 1, 10);
        few.add_trial((0..5).map(|_| vec![c(1.0)]));
        assert!(angular_uniformity(&few).is_err());
        let mut spread = EmpiricalMeasure::new(1, 1, 10);
        spread.add_trial((0..1000).map(|k| vec![Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / 1000.0)]));
        assert!(angular_uniformity(&spread).unwrap().p_values[0] > 0.99);
    }

    #[test]
    fn kac_fraction() {
        let mut me = EmpiricalMeasure::new(1, 1, 4);
        me.add_trial((0..4).map(|k| vec![Complex64::from_polar(1.0, k as f64)]));
        assert_eq!(kac_concentration(&me, 0.1).unwrap(), 1.0);
        me.add_trial(vec![vec![c(3.0)]]);
        assert_eq!(kac_concentration(&me, 0.1).unwrap(), 0.8);
    }

    #[test]
    fn logmap_single_point() {
        let e = std::f64::consts::E;
        let mut me = EmpiricalMeasure::new(2, 2, 1);
        me.add_trial(vec![vec![c(e), c(e)]]);
        let h = logmap_histogram(&me, 5).unwrap();
        assert_eq!(h.total(), 1);
        let k = h.counts.iter().position(|&c| c == 1).unwrap();
        let (x, y) = h.bin_center(k / 5, k % 5);
        assert!((x - 1.0).abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
        // far outliers are clipped out of the range
        me.add_trial(vec![vec![c(1e-30), c(1.0)]]);
        let h = logmap_histogram(&me, 5).unwrap();
        assert_eq!(h.outside, 1);
    }
}
