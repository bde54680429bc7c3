//! Quadrature, summation and goodness-of-fit helpers.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_X[j];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[j] * s;
        if j % 2 == 1 {
            g += GK_WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the total
/// error estimate is below `max(abs_tol, rel_tol * |I|)` or the interval
/// budget runs out.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (i0, e0) = gk15(&mut f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = vec![(a, b, i0, e0)];
    let mut total = i0;
    let mut err = e0;
    let mut budget = 4000;
    while err > abs_tol.max(rel_tol * total.abs()) && budget > 0 {
        budget -= 1;
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, iv, ev) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (il, el) = gk15(&mut f, lo, mid);
        let (ir, er) = gk15(&mut f, mid, hi);
        total += il + ir - iv;
        err += el + er - ev;
        parts.push((lo, mid, il, el));
        parts.push((mid, hi, ir, er));
    }
    // re-sum to avoid drift from the running updates
    parts.iter().map(|p| p.2).sum()
}

/// Integral over `[0, ∞)` via `t = s / (1 - s)`.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, abs_tol: f64, rel_tol: f64) -> f64 {
    integrate(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - s;
            let t = s / one_minus;
            let v = f(t) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// `ln(n!)` by direct summation (exact enough for the small `n` used here).
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln Σ exp(x_i)` with max subtraction.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` for `n` samples
/// (Kolmogorov series with Stephens' small-sample correction).
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = sign * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Mean and standard error of the mean.
pub fn mean_and_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Wilson score interval for a binomial proportion at ~95% confidence.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
