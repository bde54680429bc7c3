//! Orthonormal bases of `Poly(NP)` for weighted sets `(K, q, τ)` and the
//! diagonal of their Bergman kernels.
//!
//! A basis element is `F_j(z) = Σ_k C_{jk} z^{e_k}` where `e_k` runs over
//! the lattice points of `NP` in lexicographic order and `C` is lower
//! triangular. The three closed-form weighted sets (torus, unit sphere in
//! `C^2`, Fubini–Study weight on `(C*)^m`) give a diagonal `C`; the general
//! route orthonormalizes monomials against a quadrature rule.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::numeric::{gauss_legendre_on, ln_factorial};
use crate::polytope::{IntegralPolytope, LatticePoint};

/// Orthonormality residual accepted without comment.
pub const GRAM_ACCEPT: f64 = 1e-8;
/// Residual above which construction is rejected.
pub const GRAM_REJECT: f64 = 1e-6;

/// The weighted set `(K, q, τ)` defining the inner product
/// `<f, g> = ∫_K f conj(g) e^{-2Nq} dτ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WeightedSetSpec {
    /// `K = (S^1)^m`, `q = 0`, normalized Haar measure.
    TorusK,
    /// `K = S^3 ⊂ C^2`, `q = 0`, probability surface measure.
    Sphere3,
    /// `K = (C*)^m`, `q = (p/2) log(1 + |z|^2)`, Fubini–Study probability volume.
    FubiniStudy { p: u32 },
    /// User supplied quadrature nodes and weight function.
    CustomQuadrature { label: String },
}

impl WeightedSetSpec {
    /// The weight `q(z)` for the closed-form sets; `0` for custom sets
    /// (whose weight is supplied separately).
    pub fn weight(&self, z: &[Complex64]) -> f64 {
        match self {
            WeightedSetSpec::FubiniStudy { p } => fs_weight(*p, z),
            _ => 0.0,
        }
    }
}

/// `q(z) = (p/2) log(1 + |z|^2)`.
pub fn fs_weight(p: u32, z: &[Complex64]) -> f64 {
    0.5 * p as f64 * z.iter().map(|c| c.norm_sqr()).sum::<f64>().ln_1p()
}

/// Quadrature rule for the measure `τ`: nodes in `(C*)^m` with positive
/// weights summing to the total mass of `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub m: usize,
    pub nodes: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(m: usize, nodes: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(bad) = nodes.iter().find(|z| z.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: bad.len(),
            });
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidArgument("quadrature weights must be positive".into()));
        }
        Ok(QuadratureRule { m, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Product trapezoid rule on `(S^1)^m` with `per_circle` equispaced
    /// angles; exact for trigonometric polynomials of degree `< per_circle`.
    pub fn torus(m: usize, per_circle: usize) -> Self {
        let angles: Vec<Complex64> = (0..per_circle)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / per_circle as f64))
            .collect();
        let count = per_circle.pow(m as u32);
        let mut nodes = Vec::with_capacity(count);
        for idx in 0..count {
            let mut rest = idx;
            let mut z = Vec::with_capacity(m);
            for _ in 0..m {
                z.push(angles[rest % per_circle]);
                rest /= per_circle;
            }
            nodes.push(z);
        }
        let w = 1.0 / count as f64;
        QuadratureRule {
            m,
            nodes,
            weights: vec![w; count],
        }
    }

    /// Rule for the probability surface measure on `S^3`: `t = |z_1|^2` is
    /// uniform on `[0, 1]` (Gauss–Legendre in `t`), phases uniform.
    pub fn sphere3(t_nodes: usize, phases: usize) -> Self {
        let (ts, tw) = gauss_legendre_on(0.0, 1.0, t_nodes);
        let angles: Vec<Complex64> = (0..phases)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / phases as f64))
            .collect();
        let pw = 1.0 / (phases * phases) as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (t, w) in ts.iter().zip(&tw) {
            let (r1, r2) = (t.sqrt(), (1.0 - t).sqrt());
            for a in &angles {
                for b in &angles {
                    nodes.push(vec![a * r1, b * r2]);
                    weights.push(w * pw);
                }
            }
        }
        QuadratureRule {
            m: 2,
            nodes,
            weights,
        }
    }

    /// Rule for the Fubini–Study probability volume on `C^m`, `m ∈ {1, 2}`.
    ///
    /// With `t_i = |z_i|^2`, `m = 1` uses `t = s/(1-s)` (the measure becomes
    /// `ds` on `[0,1]`); `m = 2` uses `t = r (w, 1-w)`, `r = s/(1-s)` (the
    /// measure becomes `2 s ds dw`). Radial integrands `t^J (1+|t|)^{-k}`
    /// turn into polynomials in `s, w`, so Gauss–Legendre is exact once
    /// `radial` is large enough.
    pub fn fubini_study(m: usize, radial: usize, phases: usize) -> Result<Self> {
        let angles: Vec<Complex64> = (0..phases)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / phases as f64))
            .collect();
        let (ss, sw) = gauss_legendre_on(0.0, 1.0, radial);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match m {
            1 => {
                let pw = 1.0 / phases as f64;
                for (s, w) in ss.iter().zip(&sw) {
                    let r = (s / (1.0 - s)).sqrt();
                    for a in &angles {
                        nodes.push(vec![a * r]);
                        weights.push(w * pw);
                    }
                }
            }
            2 => {
                let pw = 1.0 / (phases * phases) as f64;
                let (ws, ww) = gauss_legendre_on(0.0, 1.0, radial);
                for (s, sw) in ss.iter().zip(&sw) {
                    let r = s / (1.0 - s);
                    for (w, wwt) in ws.iter().zip(&ww) {
                        let r1 = (r * w).sqrt();
                        let r2 = (r * (1.0 - w)).sqrt();
                        for a in &angles {
                            for b in &angles {
                                nodes.push(vec![a * r1, b * r2]);
                                weights.push(2.0 * s * sw * wwt * pw);
                            }
                        }
                    }
                }
            }
            _ => return Err(Error::UnsupportedDimension(m)),
        }
        Ok(QuadratureRule { m, nodes, weights })
    }
}

/// Basis coefficients `C`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    /// `F_j = c_j z^{e_j}`.
    Diagonal(Vec<f64>),
    /// Lower-triangular dense matrix.
    Dense(CMatrix),
}

/// Orthonormal basis `{F_j^N}` of `Poly(NP)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis {
    pub n: u32,
    pub m: usize,
    pub exponents: Vec<LatticePoint>,
    pub coeff: Coefficients,
    pub spec: WeightedSetSpec,
}

/// `S_N(z,z)` in log form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergmanValue {
    /// `log S_N(z, z)`.
    pub log_s: f64,
    /// `ρ_N(z) = log S_N(z, z) / (2N)`.
    pub rho: f64,
}

impl BergmanValue {
    pub fn s(&self) -> f64 {
        self.log_s.exp()
    }
}

fn dilated_points(p: &IntegralPolytope, n: u32) -> Result<Vec<LatticePoint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    Ok(p.dilate(n as i64)?.lattice_points())
}

/// Monomials `z^J` are orthonormal for the Haar measure on `(S^1)^m`.
pub fn torus_basis(p: &IntegralPolytope, n: u32) -> Result<OrthoBasis> {
    let exponents = dilated_points(p, n)?;
    let d = exponents.len();
    Ok(OrthoBasis {
        n,
        m: p.dim(),
        exponents,
        coeff: Coefficients::Diagonal(vec![1.0; d]),
        spec: WeightedSetSpec::TorusK,
    })
}

/// `c_J = sqrt((j_1 + j_2 + 1)! / (j_1! j_2!))` on `S^3`.
pub fn sphere3_basis(p: &IntegralPolytope, n: u32) -> Result<OrthoBasis> {
    if p.dim() != 2 {
        return Err(Error::InvalidWeightedSet(format!(
            "S^3 needs m = 2, got m = {}",
            p.dim()
        )));
    }
    if !p.in_positive_orthant() {
        return Err(Error::InvalidWeightedSet(
            "S^3 basis needs non-negative exponents".into(),
        ));
    }
    let exponents = dilated_points(p, n)?;
    let coeff = exponents
        .iter()
        .map(|e| {
            let (a, b) = (e.0[0] as u64, e.0[1] as u64);
            (0.5 * (ln_factorial(a + b + 1) - ln_factorial(a) - ln_factorial(b))).exp()
        })
        .collect();
    Ok(OrthoBasis {
        n,
        m: 2,
        exponents,
        coeff: Coefficients::Diagonal(coeff),
        spec: WeightedSetSpec::Sphere3,
    })
}

/// `c_J = sqrt((pN + m)! / (m! (pN - |J|)! j_1! ... j_m!))`, the inverse
/// norms of `z^J` for the weight `(1 + |z|^2)^{-pN}` against the
/// Fubini–Study probability volume.
pub fn fs_basis(p: &IntegralPolytope, n: u32, deg: u32) -> Result<OrthoBasis> {
    if !p.in_positive_orthant() {
        return Err(Error::InvalidWeightedSet(
            "Fubini–Study basis needs P in the positive orthant".into(),
        ));
    }
    if p.max_degree() > deg as i64 {
        return Err(Error::InvalidWeightedSet(format!(
            "P is not contained in {deg}Σ (max coordinate sum {})",
            p.max_degree()
        )));
    }
    let m = p.dim();
    let exponents = dilated_points(p, n)?;
    let top = deg as u64 * n as u64;
    let coeff = exponents
        .iter()
        .map(|e| fs_coefficient(top, e))
        .collect::<Result<Vec<f64>>>()?;
    Ok(OrthoBasis {
        n,
        m,
        exponents,
        coeff: Coefficients::Diagonal(coeff),
        spec: WeightedSetSpec::FubiniStudy { p: deg },
    })
}

/// Closed-form Fubini–Study coefficient for total weight degree `top = pN`.
pub fn fs_coefficient(top: u64, e: &LatticePoint) -> Result<f64> {
    let m = e.dim() as u64;
    let abs = e.degree();
    if abs < 0 || abs as u64 > top {
        return Err(Error::InvalidArgument(format!(
            "exponent {e} has |J| = {abs} outside [0, {top}]"
        )));
    }
    let mut ln = ln_factorial(top + m) - ln_factorial(m) - ln_factorial(top - abs as u64);
    for &j in e.coords() {
        ln -= ln_factorial(j as u64);
    }
    Ok((0.5 * ln).exp())
}

/// Orthonormalize the monomials of `NP` against `rule` with weight
/// `e^{-2N q}`: `G = L L^*`, `C = L^{-1}`.
pub fn gram_schmidt_basis(
    p: &IntegralPolytope,
    n: u32,
    rule: &QuadratureRule,
    q: &dyn Fn(&[Complex64]) -> f64,
    spec: WeightedSetSpec,
) -> Result<OrthoBasis> {
    if rule.m != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: rule.m,
        });
    }
    let exponents = dilated_points(p, n)?;
    let d = exponents.len();
    if rule.len() < d {
        return Err(Error::NotPositiveDefinite {
            pivot: rule.len(),
            value: 0.0,
        });
    }
    let g = monomial_gram(&exponents, n, rule, q);
    let l = linalg::cholesky_lower(g.clone())?;
    // relative pivot check: a tiny pivot means τ does not determine Poly(NP)
    let max_diag = (0..d).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    for i in 0..d {
        let piv = l[(i, i)].re;
        if piv * piv < 1e-13 * max_diag {
            return Err(Error::NotPositiveDefinite {
                pivot: i,
                value: piv * piv,
            });
        }
    }
    let c = linalg::invert_lower(l)?;
    let basis = OrthoBasis {
        n,
        m: p.dim(),
        exponents,
        coeff: Coefficients::Dense(c),
        spec,
    };
    let resid = basis.gram(rule, q).max_abs_diff(&CMatrix::identity(d));
    if resid > GRAM_REJECT {
        return Err(Error::GramResidual(resid));
    }
    Ok(basis)
}

fn monomial_gram(
    exponents: &[LatticePoint],
    n: u32,
    rule: &QuadratureRule,
    q: &dyn Fn(&[Complex64]) -> f64,
) -> CMatrix {
    let d = exponents.len();
    let mut g = CMatrix::zeros(d);
    let mut vals = vec![Complex64::new(0.0, 0.0); d];
    for (z, w) in rule.nodes.iter().zip(&rule.weights) {
        let wt = w * (-2.0 * n as f64 * q(z)).exp();
        for (v, e) in vals.iter_mut().zip(exponents) {
            *v = monomial(z, e);
        }
        for b in 0..d {
            let cb = vals[b].conj() * wt;
            for a in b..d {
                g[(a, b)] += vals[a] * cb;
            }
        }
    }
    for b in 0..d {
        for a in b + 1..d {
            g[(b, a)] = g[(a, b)].conj();
        }
    }
    g
}

/// `z^e` for a Laurent exponent.
pub fn monomial(z: &[Complex64], e: &LatticePoint) -> Complex64 {
    z.iter()
        .zip(e.coords())
        .map(|(zi, &k)| zi.powi(k as i32))
        .product()
}

impl OrthoBasis {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Values `F_j(z)` rescaled by `e^{-shift}`, with `shift` the largest
    /// monomial log-modulus at `z`. Returns `(values, shift)`.
    pub fn eval_scaled(&self, z: &[Complex64]) -> (Vec<Complex64>, f64) {
        let logs: Vec<f64> = z.iter().map(|c| c.norm().ln()).collect();
        let args: Vec<f64> = z.iter().map(|c| c.arg()).collect();
        let lm: Vec<f64> = self
            .exponents
            .iter()
            .map(|e| e.coords().iter().zip(&logs).map(|(&k, l)| k as f64 * l).sum())
            .collect();
        let shift = lm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mons: Vec<Complex64> = self
            .exponents
            .iter()
            .zip(&lm)
            .map(|(e, l)| {
                let phase: f64 = e.coords().iter().zip(&args).map(|(&k, a)| k as f64 * a).sum();
                Complex64::from_polar((l - shift).exp(), phase)
            })
            .collect();
        let vals = match &self.coeff {
            Coefficients::Diagonal(c) => mons.iter().zip(c).map(|(v, c)| v * c).collect(),
            Coefficients::Dense(c) => (0..self.len())
                .map(|j| (0..=j).map(|k| c[(j, k)] * mons[k]).sum())
                .collect(),
        };
        (vals, shift)
    }

    /// Values `F_j(z)`; may overflow for large `|z|` and `N`.
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let (vals, shift) = self.eval_scaled(z);
        let s = shift.exp();
        vals.into_iter().map(|v| v * s).collect()
    }

    /// Monomial coefficients of `Σ_j a_j F_j`, indexed like `exponents`.
    pub fn monomial_coefficients(&self, a: &[Complex64]) -> Vec<Complex64> {
        match &self.coeff {
            Coefficients::Diagonal(c) => a.iter().zip(c).map(|(a, c)| a * c).collect(),
            Coefficients::Dense(c) => (0..self.len())
                .map(|k| (k..self.len()).map(|j| a[j] * c[(j, k)]).sum())
                .collect(),
        }
    }

    /// Diagonal of the Bergman kernel `S_N(z,z) = Σ_j |F_j(z)|^2`, computed
    /// in log space.
    pub fn bergman_diag(&self, z: &[Complex64]) -> Result<BergmanValue> {
        if z.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: z.len(),
            });
        }
        if let Some(i) = z.iter().position(|c| c.norm() == 0.0) {
            return Err(Error::ZeroCoordinate(i));
        }
        let (vals, shift) = self.eval_scaled(z);
        let sum: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
        let log_s = 2.0 * shift + sum.ln();
        Ok(BergmanValue {
            log_s,
            rho: log_s / (2.0 * self.n as f64),
        })
    }

    /// Gram matrix `<F_a, F_b>` under `rule` with weight `e^{-2N q}`.
    pub fn gram(&self, rule: &QuadratureRule, q: &dyn Fn(&[Complex64]) -> f64) -> CMatrix {
        let d = self.len();
        let mut g = CMatrix::zeros(d);
        for (z, w) in rule.nodes.iter().zip(&rule.weights) {
            let (vals, shift) = self.eval_scaled(z);
            let wt = w * (2.0 * shift - 2.0 * self.n as f64 * q(z)).exp();
            for b in 0..d {
                let cb = vals[b].conj() * wt;
                for a in 0..d {
                    g[(a, b)] += vals[a] * cb;
                }
            }
        }
        g
    }

    /// `max |Gram - I|` under `rule`, using this basis' own weight.
    pub fn orthonormality_residual(&self, rule: &QuadratureRule) -> f64 {
        let spec = self.spec.clone();
        let g = self.gram(rule, &|z| spec.weight(z));
        g.max_abs_diff(&CMatrix::identity(self.len()))
    }
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    #[serde(rename = "N")]
    n: u32,
    m: usize,
    exponents: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    coeff_diag: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    coeff_dense: Option<Vec<Vec<[f64; 2]>>>,
    spec: WeightedSetSpec,
}

impl Serialize for OrthoBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (diag, dense) = match &self.coeff {
            Coefficients::Diagonal(c) => (Some(c.clone()), None),
            Coefficients::Dense(c) => (
                None,
                Some(
                    (0..c.n)
                        .map(|j| (0..=j).map(|k| [c[(j, k)].re, c[(j, k)].im]).collect())
                        .collect(),
                ),
            ),
        };
        BasisJson {
            n: self.n,
            m: self.m,
            exponents: self.exponents.iter().map(|e| e.0.clone()).collect(),
            coeff_diag: diag,
            coeff_dense: dense,
            spec: self.spec.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrthoBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BasisJson::deserialize(d)?;
        let len = raw.exponents.len();
        let coeff = match (raw.coeff_diag, raw.coeff_dense) {
            (Some(c), None) if c.len() == len => Coefficients::Diagonal(c),
            (None, Some(rows)) if rows.len() == len => {
                let mut c = CMatrix::zeros(len);
                for (j, row) in rows.iter().enumerate() {
                    if row.len() != j + 1 {
                        return Err(D::Error::custom("coeff_dense must be lower triangular rows"));
                    }
                    for (k, v) in row.iter().enumerate() {
                        c[(j, k)] = Complex64::new(v[0], v[1]);
                    }
                }
                Coefficients::Dense(c)
            }
            _ => {
                return Err(D::Error::custom(
                    "exactly one of coeff_diag / coeff_dense, sized like exponents",
                ))
            }
        };
        if raw.exponents.iter().any(|e| e.len() != raw.m) {
            return Err(D::Error::custom("exponent of wrong dimension"));
        }
        Ok(OrthoBasis {
            n: raw.n,
            m: raw.m,
            exponents: raw.exponents.into_iter().map(LatticePoint).collect(),
            coeff,
            spec: raw.spec,
        })
    }
}
