//! Integral polytopes in dimension at most three.
//!
//! Everything combinatorial (hulls, lattice points, volumes, mixed volumes)
//! is computed in exact integer/rational arithmetic. Floating point only
//! enters when a polytope is evaluated against real or complex points
//! (support functions, `H_P`, normal-cone tests).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Largest ambient dimension handled by the exact hull code.
pub const MAX_DIM: usize = 3;

/// An exponent vector `J = (j_1, ..., j_m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// `|J| = j_1 + ... + j_m`.
    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }

    fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &LatticePoint) -> Vec<i64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    fn scale(&self, n: i64) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| a * n).collect())
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Integer half-space `<normal, x> <= offset` together with the vertices of
/// the polytope lying on its boundary. For 2D polygons the two vertices are
/// the edge endpoints in counter-clockwise order; for 3D facets the vertex
/// cycle is counter-clockwise seen from outside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
    pub vertices: Vec<LatticePoint>,
}

impl Facet {
    fn slack(&self, x: &[i64]) -> i64 {
        self.offset - dot_i(&self.normal, x)
    }

    /// Euclidean length of the normal.
    pub fn normal_norm(&self) -> f64 {
        self.normal.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt()
    }
}

/// Integer hyperplane `<normal, x> = offset` containing the polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub normal: Vec<i64>,
    pub offset: i64,
}

/// Convex hull of finitely many points of `Z^m`, `1 <= m <= 3`.
#[derive(Clone, Debug)]
pub struct IntegralPolytope {
    dim: usize,
    affine_dim: usize,
    vertices: Vec<LatticePoint>,
    facets: Vec<Facet>,
    equalities: Vec<Equality>,
    volume: Rational,
}

impl PartialEq for IntegralPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Eq for IntegralPolytope {}

impl IntegralPolytope {
    /// Convex hull of `points`; only extreme points are kept.
    pub fn hull(points: &[LatticePoint]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let dim = first.dim();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        let pts: Vec<LatticePoint> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let shape = match dim {
            1 => hull_1d(&pts),
            2 => hull_2d(&pts),
            _ => hull_3d(&pts),
        };
        let mut vertices = shape.vertices;
        vertices.sort();
        Ok(IntegralPolytope {
            dim,
            affine_dim: shape.affine_dim,
            vertices,
            facets: shape.facets,
            equalities: shape.equalities,
            volume: shape.volume,
        })
    }

    /// Convenience constructor from raw coordinate rows.
    pub fn from_coords(rows: &[&[i64]]) -> Result<Self> {
        let pts: Vec<LatticePoint> = rows.iter().map(|r| LatticePoint(r.to_vec())).collect();
        Self::hull(&pts)
    }

    /// The standard unit simplex `Conv(0, e_1, ..., e_m)`.
    pub fn simplex(m: usize) -> Result<Self> {
        let mut pts = vec![LatticePoint(vec![0; m])];
        for i in 0..m {
            let mut e = vec![0; m];
            e[i] = 1;
            pts.push(LatticePoint(e));
        }
        Self::hull(&pts)
    }

    /// `[0,1]^m`.
    pub fn unit_cube(m: usize) -> Result<Self> {
        let pts: Vec<LatticePoint> = (0..1usize << m)
            .map(|mask| LatticePoint((0..m).map(|i| ((mask >> i) & 1) as i64).collect()))
            .collect();
        Self::hull(&pts)
    }

    /// `[a, b] ⊂ R`.
    pub fn interval(a: i64, b: i64) -> Result<Self> {
        Self::from_coords(&[&[a], &[b]])
    }

    /// `Conv((0,0), (0,1), (1,1), (t,0))`.
    pub fn trapezoid(t: i64) -> Result<Self> {
        Self::from_coords(&[&[0, 0], &[0, 1], &[1, 1], &[t, 0]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full(&self) -> bool {
        self.affine_dim == self.dim
    }

    /// Extreme points, sorted lexicographically.
    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    /// Facet inequalities (edges in 2D, endpoints in 1D), relative to the
    /// affine hull for lower-dimensional polytopes.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.equalities
    }

    pub fn volume(&self) -> Rational {
        self.volume
    }

    pub fn dilate(&self, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!("dilation factor {n} < 1")));
        }
        let pts: Vec<LatticePoint> = self.vertices.iter().map(|v| v.scale(n)).collect();
        Self::hull(&pts)
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(a.add(b));
            }
        }
        Self::hull(&pts)
    }

    /// Exact membership test for an integer point.
    pub fn contains_lattice(&self, x: &[i64]) -> bool {
        self.equalities
            .iter()
            .all(|e| dot_i(&e.normal, x) == e.offset)
            && self.facets.iter().all(|f| f.slack(x) >= 0)
    }

    /// Membership of a real point with absolute tolerance `tol` on every
    /// (unnormalized) defining inequality.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.equalities
            .iter()
            .all(|e| (dot_f(&e.normal, x) - e.offset as f64).abs() <= tol)
            && self
                .facets
                .iter()
                .all(|f| dot_f(&f.normal, x) <= f.offset as f64 + tol)
    }

    /// Strict interior membership with a margin, for full-dimensional polytopes.
    pub fn contains_interior(&self, x: &[f64], margin: f64) -> bool {
        self.is_full()
            && self
                .facets
                .iter()
                .all(|f| dot_f(&f.normal, x) < f.offset as f64 - margin)
    }

    /// All integer points, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains_lattice(&cur) {
                out.push(LatticePoint(cur.clone()));
            }
            // odometer increment, last coordinate fastest
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    for j in k + 1..self.dim {
                        cur[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }

    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = self.vertices[0].0.clone();
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v.0[i]);
                hi[i] = hi[i].max(v.0[i]);
            }
        }
        (lo, hi)
    }

    /// `φ_P(x) = max_{p ∈ P} <x, p>`.
    pub fn support_function(&self, x: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot_f(&v.0, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `H_P(z) = φ_P(Log z)`.
    pub fn h_p(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let logs = log_moduli(z)?;
        Ok(self.support_function(&logs))
    }

    /// Whether `u` lies in the normal cone `C_x = {u : <u,x> = φ_P(u)}`.
    pub fn in_normal_cone(&self, x: &[f64], u: &[f64]) -> Result<bool> {
        if x.len() != self.dim || u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len().min(u.len()),
            });
        }
        if !self.contains(x, 1e-9) {
            return Err(Error::NotInPolytope);
        }
        let phi = self.support_function(u);
        Ok((dot(x, u) - phi).abs() <= 1e-10 * (1.0 + phi.abs()))
    }

    /// Radius of the largest ball centred at `p` contained in `P`;
    /// non-positive when `p` is not interior.
    pub fn inscribed_radius(&self, p: &[f64]) -> f64 {
        if !self.is_full() {
            return 0.0;
        }
        self.facets
            .iter()
            .map(|f| (f.offset as f64 - dot_f(&f.normal, p)) / f.normal_norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Average of the vertices; interior for full-dimensional polytopes.
    pub fn vertex_centroid(&self) -> Vec<f64> {
        let n = self.vertices.len() as f64;
        (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.0[i] as f64).sum::<f64>() / n)
            .collect()
    }

    /// Largest coordinate sum over `P`, i.e. the smallest `p` with `P ⊂ pΣ`
    /// when `P` lies in the positive orthant.
    pub fn max_degree(&self) -> i64 {
        self.vertices.iter().map(|v| v.degree()).max().unwrap_or(0)
    }

    pub fn in_positive_orthant(&self) -> bool {
        self.vertices.iter().all(|v| v.0.iter().all(|&c| c >= 0))
    }

    /// Componentwise minimum of the vertices.
    pub fn min_corner(&self) -> Vec<i64> {
        self.bounding_box().0
    }
}

/// Exact mixed volume together with its inclusion–exclusion terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedVolumeReport {
    #[serde(with = "rational_str")]
    pub value: Rational,
    pub terms: Vec<SubsetVolume>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetVolume {
    pub subset: Vec<usize>,
    pub sign: i8,
    #[serde(with = "rational_str")]
    pub volume: Rational,
}

/// `MV_m(P_1, ..., P_m) = Σ_{∅≠S} (-1)^{m-|S|} Vol_m(Σ_{i∈S} P_i)`,
/// normalized so that `MV_m(Σ, ..., Σ) = 1`.
pub fn mixed_volume(ps: &[IntegralPolytope]) -> Result<MixedVolumeReport> {
    let m = ps.len();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    if m > MAX_DIM {
        return Err(Error::UnsupportedDimension(m));
    }
    for p in ps {
        if p.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.dim(),
            });
        }
    }
    let mut value = Rational::from_integer(0);
    let mut terms = Vec::new();
    for mask in 1usize..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let mut sum = ps[subset[0]].clone();
        for &i in &subset[1..] {
            sum = sum.minkowski_sum(&ps[i])?;
        }
        let sign: i8 = if (m - subset.len()) % 2 == 0 { 1 } else { -1 };
        let vol = sum.volume();
        value += vol * Rational::from_integer(sign as i64);
        terms.push(SubsetVolume {
            subset,
            sign,
            volume: vol,
        });
    }
    Ok(MixedVolumeReport { value, terms })
}

/// `(log|z_1|, ..., log|z_m|)`.
pub fn log_moduli(z: &[Complex64]) -> Result<Vec<f64>> {
    z.iter()
        .enumerate()
        .map(|(i, zi)| {
            let r = zi.norm();
            if r > 0.0 {
                Ok(r.ln())
            } else {
                Err(Error::ZeroCoordinate(i))
            }
        })
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_f(a: &[i64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, y)| x as f64 * y).sum()
}

fn dot_i(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn reduce(v: &mut [i64]) {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn cross3(a: &[i64], b: &[i64]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn cross2(o: &[i64], a: &[i64], b: &[i64]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

struct Shape {
    affine_dim: usize,
    vertices: Vec<LatticePoint>,
    facets: Vec<Facet>,
    equalities: Vec<Equality>,
    volume: Rational,
}

fn point_shape(p: &LatticePoint) -> Shape {
    let m = p.dim();
    let equalities = (0..m)
        .map(|i| {
            let mut e = vec![0; m];
            e[i] = 1;
            Equality {
                normal: e,
                offset: p.0[i],
            }
        })
        .collect();
    Shape {
        affine_dim: 0,
        vertices: vec![p.clone()],
        facets: Vec::new(),
        equalities,
        volume: Rational::from_integer(0),
    }
}

/// Segment `[a, b]` in any dimension: two facets along the direction and
/// `m - 1` independent equalities orthogonal to it.
fn segment_shape(a: &LatticePoint, b: &LatticePoint) -> Shape {
    let m = a.dim();
    let mut d = b.sub(a);
    reduce(&mut d);
    let neg: Vec<i64> = d.iter().map(|x| -x).collect();
    let facets = vec![
        Facet {
            offset: dot_i(&d, &b.0),
            normal: d.clone(),
            vertices: vec![b.clone()],
        },
        Facet {
            offset: dot_i(&neg, &a.0),
            normal: neg,
            vertices: vec![a.clone()],
        },
    ];
    let mut equalities = Vec::new();
    match m {
        1 => {}
        2 => {
            let mut n = vec![-d[1], d[0]];
            reduce(&mut n);
            equalities.push(Equality {
                offset: dot_i(&n, &a.0),
                normal: n,
            });
        }
        _ => {
            // cross products with the coordinate axes span d^⊥
            let mut cands: Vec<Vec<i64>> = (0..3)
                .map(|i| {
                    let mut e = [0i64; 3];
                    e[i] = 1;
                    let mut c = cross3(&d, &e).to_vec();
                    reduce(&mut c);
                    c
                })
                .filter(|c| c.iter().any(|&x| x != 0))
                .collect();
            let first = cands.remove(0);
            let second = cands
                .into_iter()
                .find(|c| cross3(&first, c).iter().any(|&x| x != 0))
                .expect("segment direction is nonzero");
            for n in [first, second] {
                equalities.push(Equality {
                    offset: dot_i(&n, &a.0),
                    normal: n,
                });
            }
        }
    }
    Shape {
        affine_dim: 1,
        vertices: vec![a.clone(), b.clone()],
        facets,
        equalities,
        volume: if m == 1 {
            Rational::from_integer((b.0[0] - a.0[0]).abs())
        } else {
            Rational::from_integer(0)
        },
    }
}

fn hull_1d(pts: &[LatticePoint]) -> Shape {
    let lo = pts.first().unwrap();
    let hi = pts.last().unwrap();
    if lo == hi {
        point_shape(lo)
    } else {
        segment_shape(lo, hi)
    }
}

/// Andrew's monotone chain on sorted, deduplicated points; collinear points
/// are dropped. Returns the counter-clockwise cycle starting at the
/// lexicographically smallest point.
fn monotone_chain(pts: &[Vec<i64>]) -> Vec<usize> {
    let n = pts.len();
    if n < 3 {
        return (0..n).collect();
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for i in 0..n {
        while hull.len() >= 2
            && cross2(&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]], &pts[i]) <= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for i in (0..n - 1).rev() {
        while hull.len() >= lower
            && cross2(&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]], &pts[i]) <= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

fn hull_2d(pts: &[LatticePoint]) -> Shape {
    let coords: Vec<Vec<i64>> = pts.iter().map(|p| p.0.clone()).collect();
    let cycle = monotone_chain(&coords);
    match cycle.len() {
        1 => return point_shape(&pts[cycle[0]]),
        2 => return segment_shape(&pts[cycle[0]], &pts[cycle[1]]),
        _ => {}
    }
    let ring: Vec<LatticePoint> = cycle.iter().map(|&i| pts[i].clone()).collect();
    let mut facets = Vec::with_capacity(ring.len());
    let mut twice_area = 0i64;
    for k in 0..ring.len() {
        let a = &ring[k];
        let b = &ring[(k + 1) % ring.len()];
        twice_area += a.0[0] * b.0[1] - a.0[1] * b.0[0];
        let mut n = vec![b.0[1] - a.0[1], a.0[0] - b.0[0]];
        reduce(&mut n);
        facets.push(Facet {
            offset: dot_i(&n, &a.0),
            normal: n,
            vertices: vec![a.clone(), b.clone()],
        });
    }
    Shape {
        affine_dim: 2,
        vertices: ring,
        facets,
        equalities: Vec::new(),
        volume: Rational::new(twice_area, 2),
    }
}

/// Ordered polygon (counter-clockwise around `normal`) of coplanar points.
fn planar_polygon(pts: &[LatticePoint], normal: &[i64; 3]) -> Vec<LatticePoint> {
    // drop the coordinate where the normal is largest
    let drop = (0..3).max_by_key(|&i| normal[i].abs()).unwrap();
    let keep: Vec<usize> = (0..3).filter(|&i| i != drop).collect();
    let mut proj: Vec<(Vec<i64>, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (vec![p.0[keep[0]], p.0[keep[1]]], i))
        .collect();
    proj.sort();
    proj.dedup_by(|a, b| a.0 == b.0);
    let coords: Vec<Vec<i64>> = proj.iter().map(|(c, _)| c.clone()).collect();
    let cycle = monotone_chain(&coords);
    let mut ring: Vec<LatticePoint> = cycle.iter().map(|&k| pts[proj[k].1].clone()).collect();
    if ring.len() >= 3 {
        let e1 = ring[1].sub(&ring[0]);
        let e2 = ring[2].sub(&ring[0]);
        let c = cross3(&e1, &e2);
        if c[0] * normal[0] + c[1] * normal[1] + c[2] * normal[2] < 0 {
            ring.reverse();
        }
    }
    ring
}

fn hull_3d(pts: &[LatticePoint]) -> Shape {
    let p0 = &pts[0];
    let Some(p1) = pts.iter().find(|p| *p != p0) else {
        return point_shape(p0);
    };
    let d1 = p1.sub(p0);
    let Some(p2) = pts
        .iter()
        .find(|p| cross3(&d1, &p.sub(p0)).iter().any(|&x| x != 0))
    else {
        let (lo, hi) = extreme_along(pts, &d1);
        return segment_shape(lo, hi);
    };
    let mut plane = cross3(&d1, &p2.sub(p0));
    reduce(&mut plane);
    let full = pts.iter().any(|p| dot_i(&plane, &p.sub(p0)) != 0);
    if !full {
        return planar_shape(pts, plane, p0);
    }

    // Brute-force facet enumeration: every supporting plane through three
    // affinely independent input points.
    let n = pts.len();
    let mut seen: BTreeSet<(Vec<i64>, i64)> = BTreeSet::new();
    let mut facets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dij = pts[j].sub(&pts[i]);
            for k in j + 1..n {
                let c = cross3(&dij, &pts[k].sub(&pts[i]));
                if c == [0, 0, 0] {
                    continue;
                }
                let mut normal = c.to_vec();
                reduce(&mut normal);
                let off = dot_i(&normal, &pts[i].0);
                let mut pos = false;
                let mut neg = false;
                for p in pts {
                    match dot_i(&normal, &p.0).cmp(&off) {
                        Ordering::Greater => pos = true,
                        Ordering::Less => neg = true,
                        Ordering::Equal => {}
                    }
                    if pos && neg {
                        break;
                    }
                }
                if pos && neg {
                    continue;
                }
                let (normal, off) = if pos {
                    (normal.iter().map(|x| -x).collect::<Vec<_>>(), -off)
                } else {
                    (normal, off)
                };
                if !seen.insert((normal.clone(), off)) {
                    continue;
                }
                let on: Vec<LatticePoint> = pts
                    .iter()
                    .filter(|p| dot_i(&normal, &p.0) == off)
                    .cloned()
                    .collect();
                let nn = [normal[0], normal[1], normal[2]];
                let ring = planar_polygon(&on, &nn);
                facets.push(Facet {
                    normal,
                    offset: off,
                    vertices: ring,
                });
            }
        }
    }
    let mut verts: BTreeSet<LatticePoint> = BTreeSet::new();
    let mut six_vol = 0i64;
    for f in &facets {
        verts.extend(f.vertices.iter().cloned());
        let v0 = &f.vertices[0].0;
        for w in f.vertices[1..].windows(2) {
            let c = cross3(&w[0].0, &w[1].0);
            six_vol += v0[0] * c[0] + v0[1] * c[1] + v0[2] * c[2];
        }
    }
    Shape {
        affine_dim: 3,
        vertices: verts.into_iter().collect(),
        facets,
        equalities: Vec::new(),
        volume: Rational::new(six_vol, 6),
    }
}

fn extreme_along<'a>(pts: &'a [LatticePoint], d: &[i64]) -> (&'a LatticePoint, &'a LatticePoint) {
    let lo = pts.iter().min_by_key(|p| dot_i(d, &p.0)).unwrap();
    let hi = pts.iter().max_by_key(|p| dot_i(d, &p.0)).unwrap();
    (lo, hi)
}

fn planar_shape(pts: &[LatticePoint], plane: [i64; 3], p0: &LatticePoint) -> Shape {
    let ring = planar_polygon(pts, &plane);
    let mut facets = Vec::with_capacity(ring.len());
    for k in 0..ring.len() {
        let a = &ring[k];
        let b = &ring[(k + 1) % ring.len()];
        // in-plane outward normal of a counter-clockwise edge
        let mut w = cross3(&b.sub(a), &plane).to_vec();
        reduce(&mut w);
        facets.push(Facet {
            offset: dot_i(&w, &a.0),
            normal: w,
            vertices: vec![a.clone(), b.clone()],
        });
    }
    Shape {
        affine_dim: 2,
        vertices: ring,
        facets,
        equalities: vec![Equality {
            normal: plane.to_vec(),
            offset: dot_i(&plane, &p0.0),
        }],
        volume: Rational::from_integer(0),
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    /// Inferred from the vertices when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    vertices: Vec<Vec<i64>>,
}

impl Serialize for IntegralPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            m: Some(self.dim),
            vertices: self.vertices.iter().map(|v| v.0.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegralPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolytopeJson::deserialize(d)?;
        let pts: Vec<LatticePoint> = raw.vertices.into_iter().map(LatticePoint).collect();
        let m = raw.m.or(pts.first().map(LatticePoint::dim)).unwrap_or(0);
        if let Some(bad) = pts.iter().find(|p| p.dim() != m) {
            return Err(serde::de::Error::custom(format!(
                "vertex of dimension {} in polytope with m = {m}",
                bad.dim(),
            )));
        }
        IntegralPolytope::hull(&pts).map_err(serde::de::Error::custom)
    }
}

/// Rationals as `"p/q"` (or `"p"`) strings.
pub mod rational_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
