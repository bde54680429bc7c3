//! Zeros in `(C*)^m` of square Laurent systems for `m ∈ {1, 2}`.
//!
//! Bivariate systems are reduced to a polynomial eigenvalue problem: the
//! Sylvester matrix of `f, g` with respect to one variable is a matrix
//! polynomial in the other (hidden) variable, whose determinant is the
//! resultant. Its companion linearization is solved by QZ, and each
//! eigenvalue is completed by back-substitution and Newton refinement.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{LaurentPolynomial, RandomPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, generalized_eigenvalues, CMatrix, LuFactor};
use crate::polytope::{mixed_volume, IntegralPolytope, LatticePoint};

/// Retained zeros must have relative residual below this.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Relative chordal distance below which two zeros are merged.
pub const DEDUP_TOL: f64 = 1e-6;
/// Zeros closer than this (chordal) to another zero are flagged.
pub const CLUSTER_TOL: f64 = 10.0 * DEDUP_TOL;
/// Coordinates outside `[BOUNDARY_LO, BOUNDARY_HI]` in modulus are treated
/// as lying on the toric boundary.
pub const BOUNDARY_LO: f64 = 1e-10;
pub const BOUNDARY_HI: f64 = 1e10;
const NEWTON_ITERS: usize = 20;
/// Leading Sylvester coefficients better conditioned than this are
/// inverted and the linearization solved as a standard eigenproblem.
const STANDARD_RCOND: f64 = 1e-8;
/// Largest hidden degree for which the shifted reformulation is tried.
const MOBIUS_MAX_DEGREE: usize = 24;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Seed of the random unit-modulus coordinate rotation.
    pub rotation_seed: u64,
    /// Apply the rotation at all.
    pub rotate: bool,
    /// Force the hidden variable (0 or 1); chosen by pencil size if unset.
    pub hidden: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rotation_seed: 0x7a3d_11c5,
            rotate: true,
            hidden: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroFlags {
    /// Another zero lies within the cluster radius.
    pub suspect: bool,
    /// Number of zeros in this zero's cluster (1 when isolated).
    pub cluster: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ZeroSet {
    pub m: usize,
    pub points: Vec<Vec<Complex64>>,
    /// Max over system components of the relative residual.
    pub residuals: Vec<f64>,
    pub flags: Vec<ZeroFlags>,
    /// Candidates rejected as boundary points, residual failures or
    /// duplicates of accepted zeros.
    pub discarded: usize,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn suspects(&self) -> usize {
        self.flags.iter().filter(|f| f.suspect).count()
    }

    fn contains(&self, z: &[Complex64]) -> bool {
        self.points.iter().any(|p| chordal(p, z) < DEDUP_TOL)
    }

    fn push(&mut self, z: Vec<Complex64>, residual: f64) {
        self.points.push(z);
        self.residuals.push(residual);
    }

    fn finish_flags(&mut self) {
        let n = self.points.len();
        self.flags = (0..n)
            .map(|i| {
                let cluster = (0..n)
                    .filter(|&j| chordal(&self.points[i], &self.points[j]) < CLUSTER_TOL)
                    .count();
                ZeroFlags {
                    suspect: cluster > 1,
                    cluster,
                }
            })
            .collect();
    }
}

/// `max_i |u_i - v_i| / (1 + |u_i| + |v_i|)`.
pub fn chordal(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm() / (1.0 + a.norm() + b.norm()))
        .fold(0.0, f64::max)
}

fn on_boundary(z: &[Complex64]) -> bool {
    z.iter()
        .any(|c| !(c.norm() >= BOUNDARY_LO && c.norm() <= BOUNDARY_HI))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub found: usize,
    pub expected: u64,
    #[serde(rename = "match")]
    pub matched: bool,
    pub discarded: usize,
    pub suspects: usize,
}

/// Compares the number of zeros found with `MV(P_1, …, P_m) N^m`.
pub fn verify_count(zeros: &ZeroSet, ps: &[IntegralPolytope], n: u32) -> Result<CountReport> {
    let mv = mixed_volume(ps)?.value;
    if *mv.denom() != 1 {
        return Err(Error::InvalidArgument(format!("non-integral mixed volume {mv}")));
    }
    let m = ps[0].dim() as u32;
    let expected = *mv.numer() as u64 * (n as u64).pow(m);
    Ok(CountReport {
        found: zeros.len(),
        expected,
        matched: zeros.len() as u64 == expected,
        discarded: zeros.discarded,
        suspects: zeros.suspects(),
    })
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Dense coefficient vector `c[k]` of `z^k` after clearing negative powers.
fn univariate_coeffs(f: &LaurentPolynomial) -> Result<Vec<Complex64>> {
    if f.m != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.m,
        });
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let lo = f
        .terms
        .iter()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(e, _)| e.0[0])
        .min()
        .unwrap();
    let hi = f
        .terms
        .iter()
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(e, _)| e.0[0])
        .max()
        .unwrap();
    let mut c = vec![czero(); (hi - lo + 1) as usize];
    for (e, v) in &f.terms {
        c[(e.0[0] - lo) as usize] += v;
    }
    Ok(c)
}

/// Roots in `C*` of a dense polynomial `Σ c_k z^k` (companion eigenvalues).
fn poly_roots(c: &[Complex64]) -> Result<(Vec<Complex64>, usize)> {
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficient".into()));
    }
    let scale = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    // trailing zeros are roots at the origin
    let lo = c.iter().position(|v| v.norm() != 0.0).unwrap();
    let hi = c.iter().rposition(|v| v.norm() != 0.0).unwrap();
    let zeros_at_origin = lo;
    let c = &c[lo..=hi];
    let d = c.len() - 1;
    if d == 0 {
        return Ok((Vec::new(), zeros_at_origin));
    }
    let lead = c[d];
    if lead.norm() < 1e-300 {
        return Err(Error::DegenerateLeading(lead.norm()));
    }
    let mut a = CMatrix::zeros(d);
    for i in 0..d {
        a[(0, i)] = -c[d - 1 - i] / lead;
        if i + 1 < d {
            a[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok((eigenvalues(a)?, zeros_at_origin))
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = czero();
    let mut dp = czero();
    let mut scale = 0.0;
    let r = z.norm();
    for v in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + v;
        scale = scale * r + v.norm();
    }
    (p, dp, scale)
}

fn polish_univariate(c: &[Complex64], mut z: Complex64) -> (Complex64, f64) {
    let (p, _, s) = horner(c, z);
    let mut res = p.norm() / (s + f64::MIN_POSITIVE);
    for _ in 0..NEWTON_ITERS {
        let (p, dp, _) = horner(c, z);
        if dp.norm() == 0.0 || res < 1e-16 {
            break;
        }
        let step = p / dp;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..8 {
            let cand = z - step * t;
            let (pc, _, sc) = horner(c, cand);
            let rc = pc.norm() / (sc + f64::MIN_POSITIVE);
            if rc < res {
                z = cand;
                res = rc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved || step.norm() <= 1e-16 * z.norm() {
            break;
        }
    }
    (z, res)
}

/// All zeros in `C*` of a univariate Laurent polynomial.
pub fn roots_univariate_laurent(f: &LaurentPolynomial) -> Result<ZeroSet> {
    let c = univariate_coeffs(f)?;
    let (roots, at_origin) = poly_roots(&c)?;
    let mut zs = ZeroSet {
        m: 1,
        discarded: at_origin,
        ..Default::default()
    };
    for r in roots {
        let (z, _) = polish_univariate(&c, r);
        let z = vec![z];
        let res = f.relative_residual(&z);
        if on_boundary(&z) || !(res < RESIDUAL_TOL) || zs.contains(&z) {
            zs.discarded += 1;
            continue;
        }
        zs.push(z, res);
    }
    zs.finish_flags();
    Ok(zs)
}

pub fn roots_univariate(f: &RandomPolynomial) -> Result<ZeroSet> {
    roots_univariate_laurent(&f.to_laurent())
}

/// Bivariate polynomial with `coeffs[a][b]` the coefficient of `x^a y^b`.
#[derive(Clone, Debug)]
struct Dense2 {
    coeffs: Vec<Vec<Complex64>>,
}

impl Dense2 {
    fn from_laurent(f: &LaurentPolynomial) -> Result<Self> {
        if f.m != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: f.m,
            });
        }
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let live: Vec<&(LatticePoint, Complex64)> =
            f.terms.iter().filter(|(_, c)| c.norm() != 0.0).collect();
        let lo: Vec<i64> = (0..2)
            .map(|i| live.iter().map(|(e, _)| e.0[i]).min().unwrap())
            .collect();
        let hi: Vec<i64> = (0..2)
            .map(|i| live.iter().map(|(e, _)| e.0[i]).max().unwrap())
            .collect();
        let mut coeffs =
            vec![vec![czero(); (hi[1] - lo[1] + 1) as usize]; (hi[0] - lo[0] + 1) as usize];
        for (e, c) in live {
            coeffs[(e.0[0] - lo[0]) as usize][(e.0[1] - lo[1]) as usize] += c;
        }
        Ok(Dense2 { coeffs })
    }

    fn deg_x(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn deg_y(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    fn transpose(&self) -> Self {
        let (dx, dy) = (self.deg_x(), self.deg_y());
        Dense2 {
            coeffs: (0..=dy)
                .map(|b| (0..=dx).map(|a| self.coeffs[a][b]).collect())
                .collect(),
        }
    }

    /// Coefficients in `y` at fixed `x`.
    fn at_x(&self, x: Complex64) -> Vec<Complex64> {
        (0..=self.deg_y())
            .map(|b| {
                let mut s = czero();
                for a in (0..=self.deg_x()).rev() {
                    s = s * x + self.coeffs[a][b];
                }
                s
            })
            .collect()
    }

    /// Value, gradient and `Σ |c x^a y^b|`.
    fn eval_grad(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64, Complex64, f64) {
        let (mut f, mut fx, mut fy, mut s) = (czero(), czero(), czero(), 0.0);
        let (rx, ry) = (x.norm(), y.norm());
        // Horner in y for each power of x, then in x
        let mut rxa = 1.0;
        let mut xa = Complex64::new(1.0, 0.0);
        let mut xa1 = czero();
        for (a, row) in self.coeffs.iter().enumerate() {
            let (mut p, mut dp, mut sc) = (czero(), czero(), 0.0);
            for c in row.iter().rev() {
                dp = dp * y + p;
                p = p * y + c;
                sc = sc * ry + c.norm();
            }
            f += xa * p;
            fy += xa * dp;
            fx += xa1 * p * a as f64;
            s += rxa * sc;
            xa1 = xa;
            xa *= x;
            rxa *= rx;
        }
        (f, fx, fy, s)
    }

    fn rel_residual(&self, x: Complex64, y: Complex64) -> f64 {
        let (f, _, _, s) = self.eval_grad(x, y);
        f.norm() / (s + f64::MIN_POSITIVE)
    }
}

fn pair_residual(f: &Dense2, g: &Dense2, x: Complex64, y: Complex64) -> f64 {
    f.rel_residual(x, y).max(g.rel_residual(x, y))
}

/// Damped Newton on `(f, g)`; returns the refined point and its residual.
fn newton2(f: &Dense2, g: &Dense2, mut x: Complex64, mut y: Complex64) -> (Complex64, Complex64, f64) {
    let mut res = pair_residual(f, g, x, y);
    for _ in 0..NEWTON_ITERS {
        if res < 1e-16 || !res.is_finite() {
            break;
        }
        let (fv, fx, fy, _) = f.eval_grad(x, y);
        let (gv, gx, gy, _) = g.eval_grad(x, y);
        let det = fx * gy - fy * gx;
        if det.norm() == 0.0 || !det.is_finite() {
            break;
        }
        let dx = -(gy * fv - fy * gv) / det;
        let dy = -(fx * gv - gx * fv) / det;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..8 {
            let (cx, cy) = (x + dx * t, y + dy * t);
            let rc = pair_residual(f, g, cx, cy);
            if rc < res {
                x = cx;
                y = cy;
                res = rc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        let small = dx.norm() <= 1e-16 * (1.0 + x.norm()) && dy.norm() <= 1e-16 * (1.0 + y.norm());
        if !improved || small {
            break;
        }
    }
    (x, y, res)
}

fn frobenius(m: &[Complex64]) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Coefficient matrices `S_k` (row-major `n x n`) of the Sylvester matrix
/// of `f, g` in `y`, as a polynomial in `x`.
fn sylvester_coeffs(f: &Dense2, g: &Dense2) -> (usize, Vec<Vec<Complex64>>) {
    let (df, dg) = (f.deg_y(), g.deg_y());
    let n = df + dg;
    let dh = f.deg_x().max(g.deg_x());
    let mut s = vec![vec![czero(); n * n]; dh + 1];
    for (k, sk) in s.iter_mut().enumerate() {
        for r in 0..dg {
            for i in 0..=df {
                if let Some(row) = f.coeffs.get(k) {
                    sk[r * n + r + df - i] += row[i];
                }
            }
        }
        for r in 0..df {
            for j in 0..=dg {
                if let Some(row) = g.coeffs.get(k) {
                    sk[(dg + r) * n + r + dg - j] += row[j];
                }
            }
        }
    }
    (n, s)
}

fn lu_if_conditioned(m: &[Complex64], n: usize) -> Option<LuFactor> {
    let mut a = CMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            a[(r, c)] = m[r * n + c];
        }
    }
    LuFactor::new(a).filter(|lu| lu.rcond() > STANDARD_RCOND)
}

/// Eigenvalues of `Σ_k T_k x^k` given the LU factors of `T_d`.
fn standard_companion(t: &[Vec<Complex64>], n: usize, lu: &LuFactor) -> Result<Vec<Complex64>> {
    let d = t.len() - 1;
    let size = n * d;
    // block row -T_d^{-1} [T_{d-1} … T_0]
    let mut top = vec![czero(); n * size];
    for blk in 0..d {
        for r in 0..n {
            for c in 0..n {
                top[(blk * n + c) * n + r] = -t[d - 1 - blk][r * n + c];
            }
        }
    }
    lu.solve_in_place(&mut top, size)?;
    let mut a = CMatrix::zeros(size);
    for j in 0..size {
        for r in 0..n {
            a[(r, j)] = top[j * n + r];
        }
    }
    for i in n..size {
        a[(i, i - n)] = Complex64::new(1.0, 0.0);
    }
    eigenvalues(a)
}

/// Coefficients of `mu^d S(x0 + 1/mu)`.
fn mobius_coeffs(s: &[Vec<Complex64>], x0: Complex64) -> Vec<Vec<Complex64>> {
    let d = s.len() - 1;
    let len = s[0].len();
    let mut t = vec![vec![czero(); len]; d + 1];
    for (k, sk) in s.iter().enumerate() {
        // (x0 mu + 1)^k mu^{d-k} = Σ_j C(k, j) x0^j mu^{j+d-k}
        let mut binom = 1.0;
        for j in 0..=k {
            let w = x0.powi(j as i32) * binom;
            for (ti, si) in t[j + d - k].iter_mut().zip(sk) {
                *ti += si * w;
            }
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    t
}

/// Finite eigenvalues of `Σ_k S_k x^k` via first companion linearization.
/// Returns `(finite eigenvalues, infinite count)`.
fn matrix_poly_eigenvalues(n: usize, s: &[Vec<Complex64>]) -> Result<(Vec<Complex64>, usize)> {
    let d = s.len() - 1;
    // balance the hidden variable: x = sigma x'
    let n0 = frobenius(&s[0]);
    let nd = frobenius(&s[d]);
    let sigma = if n0 > 0.0 && nd > 0.0 {
        (n0 / nd).powf(1.0 / d as f64)
    } else {
        1.0
    };
    let scaled: Vec<Vec<Complex64>> = s
        .iter()
        .enumerate()
        .map(|(k, m)| m.iter().map(|c| c * sigma.powi(k as i32)).collect())
        .collect();
    let norm = scaled.iter().map(|m| frobenius(m)).fold(0.0, f64::max);
    if norm == 0.0 {
        return Err(Error::DegenerateResultant);
    }
    let size = n * d;
    // well-conditioned leading coefficient: standard eigenproblem
    if let Some(lu) = lu_if_conditioned(&scaled[d], n) {
        let ev = standard_companion(&scaled, n, &lu)?;
        return Ok((ev.into_iter().map(|x| x * sigma).collect(), 0));
    }
    // otherwise x' = x0 + 1/mu, whose leading coefficient is S(x0)
    if d <= MOBIUS_MAX_DEGREE {
        for theta in [0.7f64, 2.3, 4.1] {
            let x0 = Complex64::from_polar(1.0, theta);
            let t = mobius_coeffs(&scaled, x0);
            if let Some(lu) = lu_if_conditioned(&t[d], n) {
                let mut finite = Vec::with_capacity(size);
                let mut infinite = 0;
                for mu in standard_companion(&t, n, &lu)? {
                    if mu.norm() * BOUNDARY_HI < 1.0 {
                        infinite += 1;
                    } else {
                        finite.push((x0 + mu.inv()) * sigma);
                    }
                }
                return Ok((finite, infinite));
            }
        }
    }
    let mut a = CMatrix::zeros(size);
    let mut b = CMatrix::identity(size);
    for r in 0..n {
        for c in 0..n {
            b[(r, c)] = scaled[d][r * n + c] / norm;
            for blk in 0..d {
                a[(r, blk * n + c)] = -scaled[d - 1 - blk][r * n + c] / norm;
            }
        }
    }
    for i in n..size {
        a[(i, i - n)] = Complex64::new(1.0, 0.0);
    }
    let anorm = frobenius(&a.data);
    let bnorm = frobenius(&b.data);
    let pairs = generalized_eigenvalues(a, b)?;
    let mut finite = Vec::with_capacity(size);
    let mut infinite = 0;
    for (al, be) in pairs {
        if al.norm() <= 1e-12 * anorm && be.norm() <= 1e-12 * bnorm {
            return Err(Error::DegenerateResultant);
        }
        if be.norm() <= 1e-13 * al.norm() {
            infinite += 1;
        } else {
            finite.push(al / be * sigma);
        }
    }
    Ok((finite, infinite))
}

/// Deterministic unit-modulus rotation factors.
fn rotation(opts: &SolverOptions, m: usize) -> Vec<Complex64> {
    if !opts.rotate {
        return vec![Complex64::new(1.0, 0.0); m];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rotation_seed);
    (0..m)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::from_polar(1.0, 2.0 * PI * u)
        })
        .collect()
}

/// Change of coordinates `w_i = λ_i u_i^{±1}`.
#[derive(Clone, Debug)]
struct Chart {
    lambda: Vec<Complex64>,
    invert: [bool; 2],
}

impl Chart {
    /// `f(w(u))` as a Laurent polynomial in `u`.
    fn pull_back(&self, f: &LaurentPolynomial) -> LaurentPolynomial {
        LaurentPolynomial {
            m: f.m,
            terms: f
                .terms
                .iter()
                .map(|(e, c)| {
                    let flipped: Vec<i64> = e
                        .0
                        .iter()
                        .zip(self.invert)
                        .map(|(&k, inv)| if inv { -k } else { k })
                        .collect();
                    (LatticePoint(flipped), c * crate::basis::monomial(&self.lambda, e))
                })
                .collect(),
        }
    }

    fn to_original(&self, u: &mut [Complex64]) {
        for ((ui, l), inv) in u.iter_mut().zip(&self.lambda).zip(self.invert) {
            *ui = if inv { l / *ui } else { *ui * l };
        }
    }
}

/// Generic zero count `MV(NP(f), NP(g))` from the Newton polytopes.
fn bk_bound(f: &LaurentPolynomial, g: &LaurentPolynomial) -> Option<u64> {
    let np = |p: &LaurentPolynomial| {
        let pts: Vec<LatticePoint> = p
            .terms
            .iter()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(e, _)| e.clone())
            .collect();
        IntegralPolytope::hull(&pts).ok()
    };
    let mv = mixed_volume(&[np(f)?, np(g)?]).ok()?.value;
    (*mv.denom() == 1).then(|| *mv.numer() as u64)
}

/// One elimination pass; `swap` hides the second variable instead of the
/// first. New zeros (in original coordinates) are appended to `zs`.
#[allow(clippy::too_many_arguments)]
fn solve_pass(
    pf: &Dense2,
    pg: &Dense2,
    swap: bool,
    chart: &Chart,
    f: &LaurentPolynomial,
    g: &LaurentPolynomial,
    zs: &mut ZeroSet,
) -> Result<usize> {
    let (n, s) = sylvester_coeffs(pf, pg);
    let (xs, _) = matrix_poly_eigenvalues(n, &s)?;
    let mut discarded = 0;
    for x in xs {
        if on_boundary(&[x]) {
            discarded += 1;
            continue;
        }
        // y candidates from both polynomials, best residual first
        let (cf, cg) = (pf.at_x(x), pg.at_x(x));
        let fibre_res = |y: Complex64| {
            let (a, _, sa) = horner(&cf, y);
            let (b, _, sb) = horner(&cg, y);
            (a.norm() / (sa + f64::MIN_POSITIVE)).max(b.norm() / (sb + f64::MIN_POSITIVE))
        };
        let mut cands: Vec<(f64, Complex64)> = Vec::new();
        for c in [&cf, &cg] {
            if let Ok((ys, _)) = poly_roots(c) {
                cands.extend(ys.into_iter().map(|y| (fibre_res(y), y)));
            }
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut accepted = false;
        for &(_, y) in cands.iter().take(4) {
            let (nx, ny, res) = newton2(pf, pg, x, y);
            let mut w = if swap { vec![ny, nx] } else { vec![nx, ny] };
            if on_boundary(&w) || !(res < RESIDUAL_TOL) {
                continue;
            }
            chart.to_original(&mut w);
            if zs.contains(&w) {
                continue;
            }
            let res = f.relative_residual(&w).max(g.relative_residual(&w));
            if !(res < RESIDUAL_TOL) {
                continue;
            }
            zs.push(w, res);
            accepted = true;
            break;
        }
        if !accepted {
            discarded += 1;
        }
    }
    Ok(discarded)
}

/// Linearization size when the first variable is hidden.
fn hidden_size(f: &Dense2, g: &Dense2) -> usize {
    let n = f.deg_y() + g.deg_y();
    let d = f.deg_x().max(g.deg_x());
    if n == 0 || d == 0 {
        usize::MAX
    } else {
        n * d
    }
}

/// One elimination in `chart`, hiding the variable with the smaller
/// linearization (or the other one when `other` is set). Returns the
/// discard count, or `None` if that orientation is empty.
fn solve_chart(
    f: &LaurentPolynomial,
    g: &LaurentPolynomial,
    chart: &Chart,
    hidden: Option<usize>,
    other: bool,
    zs: &mut ZeroSet,
) -> Result<Option<usize>> {
    let df = Dense2::from_laurent(&chart.pull_back(f))?;
    let dg = Dense2::from_laurent(&chart.pull_back(g))?;
    let (ft, gt) = (df.transpose(), dg.transpose());
    let (s_x, s_y) = (hidden_size(&df, &dg), hidden_size(&ft, &gt));
    if s_x == usize::MAX && s_y == usize::MAX {
        return Err(Error::DegenerateResultant);
    }
    let preferred = match hidden {
        Some(0) => false,
        Some(_) => true,
        None => s_y < s_x || (s_y == s_x && ft.deg_x().max(gt.deg_x()) < df.deg_x().max(dg.deg_x())),
    };
    let swap = preferred != other;
    if if swap { s_y } else { s_x } == usize::MAX {
        return Ok(None);
    }
    let (pf, pg) = if swap { (&ft, &gt) } else { (&df, &dg) };
    solve_pass(pf, pg, swap, chart, f, g, zs).map(Some)
}

/// Simultaneous zeros in `(C*)^2` of two bivariate Laurent polynomials.
///
/// If the first elimination yields fewer zeros than the generic count of
/// the Newton polytopes, the system is solved again in the charts
/// `u_i -> 1/u_i` (where zeros of extreme modulus are better conditioned)
/// and then with the other variable hidden, until the count is reached.
/// All results are merged; `discarded` reports the first pass only.
pub fn solve_bivariate_laurent(
    f: &LaurentPolynomial,
    g: &LaurentPolynomial,
    opts: &SolverOptions,
) -> Result<ZeroSet> {
    let lambda = rotation(opts, 2);
    let mut zs = ZeroSet {
        m: 2,
        ..Default::default()
    };
    let chart = |invert| Chart {
        lambda: lambda.clone(),
        invert,
    };
    zs.discarded = solve_chart(f, g, &chart([false, false]), opts.hidden, false, &mut zs)?.unwrap_or(0);
    if opts.hidden.is_some() {
        zs.finish_flags();
        return Ok(zs);
    }
    if let Some(bound) = bk_bound(f, g) {
        let charts = [[false, false], [false, true], [true, false], [true, true]];
        // cheaper orientation first
        let steps = charts[1..]
            .iter()
            .map(|c| (*c, false))
            .chain(charts.iter().map(|c| (*c, true)));
        for (invert, other) in steps {
            if zs.len() as u64 >= bound {
                break;
            }
            solve_chart(f, g, &chart(invert), None, other, &mut zs)?;
        }
    }
    zs.finish_flags();
    Ok(zs)
}

pub fn solve_bivariate(f: &RandomPolynomial, g: &RandomPolynomial) -> Result<ZeroSet> {
    solve_bivariate_laurent(&f.to_laurent(), &g.to_laurent(), &SolverOptions::default())
}

/// `(log|z_1|, log|z_2|)` for torus zeros of `f(z_1, ·)` with `z_1` on
/// circles of the given moduli at `angles` equally spaced arguments.
pub fn amoeba_sample_laurent(
    f: &LaurentPolynomial,
    moduli: &[f64],
    angles: usize,
) -> Result<Vec<[f64; 2]>> {
    let d = Dense2::from_laurent(f)?;
    let mut out = Vec::new();
    for &r in moduli {
        for k in 0..angles {
            let x = Complex64::from_polar(r, 2.0 * PI * k as f64 / angles as f64);
            let c = d.at_x(x);
            let Ok((ys, _)) = poly_roots(&c) else {
                continue;
            };
            for y in ys {
                let (y, res) = polish_univariate(&c, y);
                if res < RESIDUAL_TOL && !on_boundary(&[y]) {
                    out.push([r.ln(), y.norm().ln()]);
                }
            }
        }
    }
    Ok(out)
}

pub fn amoeba_sample(f: &RandomPolynomial, moduli: &[f64], angles: usize) -> Result<Vec<[f64; 2]>> {
    amoeba_sample_laurent(&f.to_laurent(), moduli, angles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn lp(m: usize, terms: &[(&[i64], f64)]) -> LaurentPolynomial {
        LaurentPolynomial::new(m, terms.iter().map(|(e, v)| (e.to_vec(), c(*v))).collect()).unwrap()
    }

    fn sorted_re(zs: &ZeroSet, i: usize) -> Vec<f64> {
        let mut v: Vec<f64> = zs.points.iter().map(|p| p[i].re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn univariate_trivial() {
        let zs = roots_univariate_laurent(&lp(1, &[(&[2], 1.0), (&[0], -1.0)])).unwrap();
        let r = sorted_re(&zs, 0);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
        let zs = roots_univariate_laurent(&lp(1, &[(&[1], 1.0), (&[-1], -1.0)])).unwrap();
        assert_eq!(zs.len(), 2);
        // z^2 (z - 3): the double root at 0 is not in C*
        let zs = roots_univariate_laurent(&lp(1, &[(&[3], 1.0), (&[2], -3.0)])).unwrap();
        assert_eq!(zs.len(), 1);
        assert!((zs.points[0][0] - c(3.0)).norm() < 1e-14);
        assert!(matches!(
            roots_univariate_laurent(&lp(1, &[(&[0], 0.0)])),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn bivariate_trivial() {
        let f = lp(2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)]);
        let g = lp(2, &[(&[1, 0], 1.0), (&[0, 0], -2.0)]);
        let zs = solve_bivariate_laurent(&f, &g, &SolverOptions::default()).unwrap();
        assert_eq!(zs.len(), 1);
        assert!((zs.points[0][0] - c(2.0)).norm() < 1e-12);
        assert!((zs.points[0][1] - c(0.5)).norm() < 1e-12);

        let f = lp(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[0, 0], -3.0)]);
        let g = lp(2, &[(&[1, 1], 1.0), (&[0, 0], -2.0)]);
        let zs = solve_bivariate_laurent(&f, &g, &SolverOptions::default()).unwrap();
        let xs = sorted_re(&zs, 0);
        assert_eq!(xs.len(), 2);
        assert!((xs[0] - 1.0).abs() < 1e-12 && (xs[1] - 2.0).abs() < 1e-12);
        for p in &zs.points {
            assert!((p[0] + p[1] - c(3.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn bivariate_with_negative_exponents() {
        // x - 2 = 0, y - 1/y = 0
        let f = lp(2, &[(&[1, 0], 1.0), (&[0, 0], -2.0)]);
        let g = lp(2, &[(&[0, 1], 1.0), (&[0, -1], -1.0)]);
        let zs = solve_bivariate_laurent(&f, &g, &SolverOptions::default()).unwrap();
        assert_eq!(zs.len(), 2);
        let ys = sorted_re(&zs, 1);
        assert!((ys[0] + 1.0).abs() < 1e-12 && (ys[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn common_factor_is_degenerate() {
        // f = (x - y)(x + 1), g = (x - y)(y - 2)
        let f = lp(2, &[(&[2, 0], 1.0), (&[1, 0], 1.0), (&[1, 1], -1.0), (&[0, 1], -1.0)]);
        let g = lp(2, &[(&[1, 1], 1.0), (&[1, 0], -2.0), (&[0, 2], -1.0), (&[0, 1], 2.0)]);
        assert!(matches!(
            solve_bivariate_laurent(&f, &g, &SolverOptions::default()),
            Err(Error::DegenerateResultant)
        ));
    }

    #[test]
    fn chordal_metric() {
        let u = [c(1e8)];
        let v = [c(1e8 + 1.0)];
        assert!(chordal(&u, &v) < DEDUP_TOL);
        assert!(chordal(&[c(0.0)], &[c(1e-3)]) > DEDUP_TOL);
    }

    #[test]
    fn amoeba_trivial() {
        let f = lp(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[0, 0], -1.0)]);
        let pts = amoeba_sample_laurent(&f, &[0.5], 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0][0] - 0.5f64.ln()).abs() < 1e-12);
        assert!((pts[0][1] - 0.5f64.ln()).abs() < 1e-12);
        let f = lp(2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)]);
        for p in amoeba_sample_laurent(&f, &[0.3, 1.0, 4.0], 7).unwrap() {
            assert!((p[0] + p[1]).abs() < 1e-12);
        }
    }
}
