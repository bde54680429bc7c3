//! Random coefficient laws and random Laurent polynomials.
//!
//! Every draw is addressable: the ChaCha key is derived from the master
//! seed and experiment id, the ChaCha stream is the polynomial index and
//! the word position is fixed per coefficient index (each coefficient
//! consumes exactly two `u64`s). Reproducing a single coefficient never
//! requires replaying earlier ones, and results do not depend on thread
//! scheduling.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::basis::OrthoBasis;
use crate::error::{Error, Result};
use crate::numeric::{ks_pvalue, ks_statistic, mean_and_sem, wilson_interval};
use crate::polytope::LatticePoint;

/// 32-bit ChaCha words consumed per coefficient.
const WORDS_PER_COEFF: u128 = 4;

/// Address of a random polynomial: `(master seed, experiment, polynomial)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub experiment: u64,
    pub polynomial: u64,
}

impl StreamKey {
    pub fn new(seed: u64, experiment: u64, polynomial: u64) -> Self {
        StreamKey {
            seed,
            experiment,
            polynomial,
        }
    }

    /// Generator positioned at coefficient `index` of this polynomial.
    pub fn rng_at(&self, index: u64) -> ChaCha20Rng {
        let mut key = [0u8; 32];
        let mut state = self.seed ^ self.experiment.rotate_left(32) ^ 0x5851_f42d_4c95_7f2d;
        for chunk in key.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(self.polynomial);
        rng.set_word_pos(index as u128 * WORDS_PER_COEFF);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform on `(0, 1]`.
fn unit_open0(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Box–Muller pair of independent standard normals.
fn normal_pair(rng: &mut ChaCha20Rng) -> (f64, f64) {
    let u1 = unit_open0(rng.next_u64());
    let u2 = unit_open0(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * PI * u2;
    (r * th.cos(), r * th.sin())
}

/// User-supplied i.i.d. law: modulus by inverse CDF, uniform phase.
#[derive(Clone)]
pub struct CustomLaw {
    pub name: String,
    /// Tail exponent `ρ` with `P{|a| > R} = O(R^{-ρ})`.
    pub tail_exponent: f64,
    /// Inverse CDF of the modulus on `(0, 1]`.
    pub quantile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLaw")
            .field("name", &self.name)
            .field("tail_exponent", &self.tail_exponent)
            .finish_non_exhaustive()
    }
}

/// Distribution of the coefficient vector `a ∈ C^{d_N}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "law")]
pub enum CoefficientLaw {
    /// `(x + iy)/√2`, `x, y` standard normal, so `E|a|^2 = 1`.
    ComplexGaussianStd,
    RealGaussianStd,
    /// `P{|a| > R} = R^{-alpha}` for `R ≥ 1`, uniform phase.
    ParetoModulus { alpha: f64 },
    /// Uniform probability on the unit sphere `S^{2d_N - 1}`.
    SphereUniform,
    #[serde(skip)]
    CustomIid(CustomLaw),
}

impl CoefficientLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientLaw::ParetoModulus { alpha } if !(*alpha > 0.0) => Err(
                Error::InvalidArgument(format!("Pareto exponent must be positive, got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    /// Tail exponent of the modulus, `∞` for light tails.
    pub fn tail_exponent(&self) -> f64 {
        match self {
            CoefficientLaw::ParetoModulus { alpha } => *alpha,
            CoefficientLaw::CustomIid(c) => c.tail_exponent,
            _ => f64::INFINITY,
        }
    }

    fn iid_draw(&self, rng: &mut ChaCha20Rng) -> Complex64 {
        match self {
            CoefficientLaw::ComplexGaussianStd | CoefficientLaw::SphereUniform => {
                let (x, y) = normal_pair(rng);
                Complex64::new(x / SQRT_2, y / SQRT_2)
            }
            CoefficientLaw::RealGaussianStd => Complex64::new(normal_pair(rng).0, 0.0),
            CoefficientLaw::ParetoModulus { alpha } => {
                let u = unit_open0(rng.next_u64());
                let th = 2.0 * PI * unit_open0(rng.next_u64());
                Complex64::from_polar(u.powf(-1.0 / alpha), th)
            }
            CoefficientLaw::CustomIid(c) => {
                let u = unit_open0(rng.next_u64());
                let th = 2.0 * PI * unit_open0(rng.next_u64());
                Complex64::from_polar((c.quantile)(u), th)
            }
        }
    }

    /// Draw `d` coefficients for the polynomial addressed by `key`.
    pub fn sample(&self, d: usize, key: &StreamKey) -> Vec<Complex64> {
        let mut rng = key.rng_at(0);
        let mut a: Vec<Complex64> = (0..d).map(|_| self.iid_draw(&mut rng)).collect();
        if let CoefficientLaw::SphereUniform = self {
            let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for c in a.iter_mut() {
                *c /= norm;
            }
        }
        a
    }

    /// Coefficient `index` alone, without generating the earlier ones.
    /// Not available for `SphereUniform`, whose normalization couples all
    /// coefficients.
    pub fn sample_one(&self, index: u64, key: &StreamKey) -> Option<Complex64> {
        if let CoefficientLaw::SphereUniform = self {
            return None;
        }
        Some(self.iid_draw(&mut key.rng_at(index)))
    }
}

/// `f_N = Σ_j a_j F_j^N`.
#[derive(Clone, Debug)]
pub struct RandomPolynomial {
    pub basis: Arc<OrthoBasis>,
    pub a: Vec<Complex64>,
    pub key: StreamKey,
}

impl RandomPolynomial {
    pub fn new(basis: Arc<OrthoBasis>, a: Vec<Complex64>, key: StreamKey) -> Result<Self> {
        if a.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: a.len(),
            });
        }
        Ok(RandomPolynomial { basis, a, key })
    }

    pub fn m(&self) -> usize {
        self.basis.m
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let (vals, shift) = self.basis.eval_scaled(z);
        let s: Complex64 = vals.iter().zip(&self.a).map(|(f, a)| f * a).sum();
        s * shift.exp()
    }

    /// `|f(z)| / (Σ_j |a_j F_j(z)| + tiny)`.
    pub fn relative_residual(&self, z: &[Complex64]) -> f64 {
        let (vals, _) = self.basis.eval_scaled(z);
        let s: Complex64 = vals.iter().zip(&self.a).map(|(f, a)| f * a).sum();
        let scale: f64 = vals.iter().zip(&self.a).map(|(f, a)| (f * a).norm()).sum();
        s.norm() / (scale + f64::MIN_POSITIVE)
    }

    /// Expansion in monomials: `(exponent, coefficient)` pairs.
    pub fn to_laurent(&self) -> LaurentPolynomial {
        let coeffs = self.basis.monomial_coefficients(&self.a);
        LaurentPolynomial {
            m: self.basis.m,
            terms: self.basis.exponents.iter().cloned().zip(coeffs).collect(),
        }
    }
}

/// Laurent polynomial in monomial form.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolynomial {
    pub m: usize,
    pub terms: Vec<(LatticePoint, Complex64)>,
}

impl LaurentPolynomial {
    pub fn new(m: usize, terms: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: e.len(),
            });
        }
        Ok(LaurentPolynomial {
            m,
            terms: terms.into_iter().map(|(e, c)| (LatticePoint(e), c)).collect(),
        })
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * crate::basis::monomial(z, e))
            .sum()
    }

    /// `|f(z)| / (Σ |c_J z^J| + tiny)`.
    pub fn relative_residual(&self, z: &[Complex64]) -> f64 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (e, c) in &self.terms {
            let t = c * crate::basis::monomial(z, e);
            num += t;
            den += t.norm();
        }
        num.norm() / (den + f64::MIN_POSITIVE)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.norm() == 0.0)
    }
}

/// `k` independent random polynomials sharing `m` and `N`.
#[derive(Clone, Debug)]
pub struct PolynomialSystem {
    pub components: Vec<RandomPolynomial>,
}

impl PolynomialSystem {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn m(&self) -> usize {
        self.components[0].m()
    }
}

pub fn sample_polynomial(
    basis: Arc<OrthoBasis>,
    law: &CoefficientLaw,
    key: StreamKey,
) -> RandomPolynomial {
    let a = law.sample(basis.len(), &key);
    RandomPolynomial { basis, a, key }
}

/// Polynomial stream index of component `component` in trial `trial`.
pub fn system_stream(trial: u64, component: usize) -> u64 {
    (trial << 8) | component as u64
}

/// Independent draws for each `(basis, law)` pair, component `i` of trial
/// `trial` on stream `system_stream(trial, i)`.
pub fn sample_system(
    specs: &[(Arc<OrthoBasis>, CoefficientLaw)],
    seed: u64,
    experiment: u64,
    trial: u64,
) -> Result<PolynomialSystem> {
    let (first, _) = specs.first().ok_or(Error::EmptyInput)?;
    let (m, n) = (first.m, first.n);
    if specs.len() > m {
        return Err(Error::InvalidArgument(format!(
            "{} polynomials in {m} variables",
            specs.len()
        )));
    }
    if let Some((b, _)) = specs.iter().find(|(b, _)| b.m != m || b.n != n) {
        return Err(Error::InvalidArgument(format!(
            "component basis has (m, N) = ({}, {}), expected ({m}, {n})",
            b.m, b.n
        )));
    }
    let components = specs
        .iter()
        .enumerate()
        .map(|(i, (b, law))| {
            let key = StreamKey::new(seed, experiment, system_stream(trial, i));
            sample_polynomial(b.clone(), law, key)
        })
        .collect();
    Ok(PolynomialSystem { components })
}

/// Monte Carlo proxies for the moment/tail conditions on a coefficient law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub d: usize,
    pub n: u32,
    pub trials: usize,
    /// `E log|<a, u>|` estimates, one per random unit direction `u`.
    pub log_inner_means: Vec<f64>,
    pub log_inner_sems: Vec<f64>,
    /// `sup_u |E log|<a,u>||` over the sampled directions.
    pub a1_sup: f64,
    /// `max - min` of the per-direction means.
    pub a1_spread: f64,
    pub eps: f64,
    /// Empirical `P{log |a| > N eps}` with Wilson interval.
    pub a2_prob: f64,
    pub a2_ci: (f64, f64),
    pub t: f64,
    /// Empirical `P{log |<a,u>| < -N t}` (first direction) with Wilson interval.
    pub a3_prob: f64,
    pub a3_ci: (f64, f64),
}

/// Number of random unit directions probed for the first-moment proxy.
pub const DIAGNOSTIC_DIRECTIONS: usize = 20;

pub fn tail_diagnostics(
    law: &CoefficientLaw,
    d: usize,
    n: u32,
    trials: usize,
    eps: f64,
    t: f64,
    seed: u64,
) -> Result<DiagnosticsReport> {
    if trials < 1000 {
        return Err(Error::InvalidArgument(format!(
            "tail diagnostics need at least 1000 trials, got {trials}"
        )));
    }
    law.validate()?;
    // directions live on their own experiment id
    let dirs: Vec<Vec<Complex64>> = (0..DIAGNOSTIC_DIRECTIONS)
        .map(|i| {
            CoefficientLaw::SphereUniform.sample(d, &StreamKey::new(seed, u64::MAX, i as u64))
        })
        .collect();
    let mut logs = vec![Vec::with_capacity(trials); DIAGNOSTIC_DIRECTIONS];
    let mut a2 = 0usize;
    let mut a3 = 0usize;
    let nf = n as f64;
    for trial in 0..trials {
        let a = law.sample(d, &StreamKey::new(seed, u64::MAX - 1, trial as u64));
        let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm.ln() > nf * eps {
            a2 += 1;
        }
        for (k, u) in dirs.iter().enumerate() {
            let ip: Complex64 = a.iter().zip(u).map(|(x, y)| x * y.conj()).sum();
            let l = ip.norm().ln();
            if k == 0 && l < -nf * t {
                a3 += 1;
            }
            logs[k].push(l);
        }
    }
    let stats: Vec<(f64, f64)> = logs.iter().map(|l| mean_and_sem(l)).collect();
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = means.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DiagnosticsReport {
        d,
        n,
        trials,
        a1_sup: means.iter().map(|m| m.abs()).fold(0.0, f64::max),
        a1_spread: max - min,
        log_inner_sems: stats.iter().map(|s| s.1).collect(),
        log_inner_means: means,
        eps,
        a2_prob: a2 as f64 / trials as f64,
        a2_ci: wilson_interval(a2, trials),
        t,
        a3_prob: a3 as f64 / trials as f64,
        a3_ci: wilson_interval(a3, trials),
    })
}

/// Union bound `d P{|a_j| > e^{N eps}/√d}` for Pareto coefficients.
pub fn pareto_a2_bound(alpha: f64, d: usize, n: u32, eps: f64) -> f64 {
    let r = (n as f64 * eps).exp() / (d as f64).sqrt();
    let tail = if r <= 1.0 { 1.0 } else { r.powf(-alpha) };
    (d as f64 * tail).min(1.0)
}

/// KS test of `|a_1|^2` for normalized draws against `Beta(1, d-1)`, the
/// law of a coordinate of a uniform point on `S^{2d-1}`. Returns
/// `(statistic, p-value)`.
pub fn sphere_coordinate_ks(law: &CoefficientLaw, d: usize, samples: usize, seed: u64) -> (f64, f64) {
    let xs: Vec<f64> = (0..samples)
        .map(|i| {
            let a = law.sample(d, &StreamKey::new(seed, 7, i as u64));
            let norm2: f64 = a.iter().map(|c| c.norm_sqr()).sum();
            a[0].norm_sqr() / norm2
        })
        .collect();
    let dm1 = (d - 1) as i32;
    let stat = ks_statistic(&xs, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(dm1));
    (stat, ks_pvalue(stat, samples))
}
