//! Closed subgroups of R^n (n <= 4) as points of the Chabauty space.
//!
//! Every closed subgroup of R^n splits as `V + L` with `V` a linear subspace
//! and `L` a lattice in a complement. We store `V` by an orthonormal basis and
//! `L` by a reduced basis of its projection to `V^perp`.
//!
//! The Chabauty topology is metrized here by the Hausdorff distance between
//! truncations to a closed ball of radius `R`. On this class the truncation
//! distances going to zero for every `R` is the working definition of
//! convergence; that it generates exactly the topology given by the
//! "misses a compact set" / "meets an open set" sub-base is an assumption,
//! checked on worked examples only.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{LabError, Result};
use crate::linalg::RatMatrix;

/// Largest ambient dimension with guaranteed enumeration.
pub const MAX_DIM: usize = 4;
/// Cap on enumerated lattice points.
pub const ENUM_CAP: usize = 2_000_000;
/// Basis vectors shorter than this across three consecutive terms merge into
/// the connected part.
pub const MERGE_TOL: f64 = 1e-6;
const REL_TOL: f64 = 1e-9;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Flips `v` so its first non-negligible coordinate is positive.
fn sign_normalize(v: &mut [f64]) {
    let n = norm(v);
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-12 * n) {
        if *x < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Gram-Schmidt; drops vectors dependent on earlier ones.
fn orthonormal(vs: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                w = axpy(&w, -dot(&w, e), e);
            }
        }
        let n = norm(&w);
        if n > tol * norm(v).max(1.0) {
            out.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

fn project_off(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    basis.iter().fold(v.to_vec(), |w, e| axpy(&w, -dot(&w, e), e))
}

fn project_onto(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    basis.iter().fold(vec![0.0; v.len()], |w, e| axpy(&w, dot(v, e), e))
}

/// A closed subgroup `V + L` of R^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuclideanLatticeSubgroup {
    dim: usize,
    /// Orthonormal basis of the connected part.
    connected: Vec<Vec<f64>>,
    /// Reduced basis of the discrete part, orthogonal to the connected part.
    discrete: Vec<Vec<f64>>,
}

impl EuclideanLatticeSubgroup {
    /// `span(connected_dirs) + Z-span(lattice)`; the lattice generators are
    /// projected off the connected part and then reduced.
    pub fn new(dim: usize, connected_dirs: &[Vec<f64>], lattice: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LabError::pre(format!("ambient dimension must be in 1..={MAX_DIM}")));
        }
        for v in connected_dirs.iter().chain(lattice) {
            if v.len() != dim {
                return Err(LabError::DimensionMismatch { expected: dim, found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(LabError::pre("non-finite coordinate"));
            }
        }
        let mut connected = if orthonormal(connected_dirs, 1e-10).len() == dim {
            (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
        } else {
            orthonormal(connected_dirs, 1e-10)
        };
        connected.iter_mut().for_each(|e| sign_normalize(e));
        let projected: Vec<Vec<f64>> = lattice.iter().map(|b| project_off(b, &connected)).collect();
        if projected.iter().any(|b| norm(b) <= 1e-300) {
            return Err(LabError::pre("a lattice generator lies in the connected part"));
        }
        if orthonormal(&projected, 1e-10).len() < projected.len() {
            return Err(LabError::pre("lattice generators are dependent modulo the connected part"));
        }
        let discrete = reduce_basis(&projected)?;
        Ok(Self { dim, connected, discrete })
    }

    pub fn lattice(basis: &[Vec<f64>]) -> Result<Self> {
        let dim = basis.first().map(Vec::len).ok_or_else(|| LabError::Empty("basis".into()))?;
        Self::new(dim, &[], basis)
    }

    /// The trivial subgroup `{0}`.
    pub fn trivial(dim: usize) -> Result<Self> {
        Self::new(dim, &[], &[])
    }

    /// All of R^n.
    pub fn whole(dim: usize) -> Result<Self> {
        let id: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(dim, &id, &[])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn connected(&self) -> &[Vec<f64>] {
        &self.connected
    }

    pub fn discrete(&self) -> &[Vec<f64>] {
        &self.discrete
    }

    /// Discrete with full rank.
    pub fn is_lattice(&self) -> bool {
        self.connected.is_empty() && self.discrete.len() == self.dim
    }

    /// Points of the discrete part within distance `radius` of 0, zero
    /// included.
    pub fn discrete_points(&self, radius: f64) -> Result<Vec<Vec<f64>>> {
        let mut pts = vec![vec![0.0; self.dim]];
        if !self.discrete.is_empty() {
            pts.extend(enumerate(&self.discrete, radius, ENUM_CAP)?.into_iter().map(|(_, v)| v));
        }
        Ok(pts)
    }
}

/// `|det(basis)|` of a full-rank lattice.
pub fn covolume(basis: &[Vec<f64>]) -> Result<f64> {
    let n = basis.len();
    if n == 0 || basis.iter().any(|b| b.len() != n) {
        return Err(LabError::pre("covolume needs n vectors in R^n"));
    }
    let det = DMatrix::from_fn(n, n, |i, j| basis[i][j]).determinant().abs();
    let scale: f64 = basis.iter().map(|b| norm(b)).product();
    if det <= 1e-12 * scale {
        return Err(LabError::pre("basis is rank-deficient"));
    }
    Ok(det)
}

/// Exact covolume of a lattice with rational basis.
pub fn covolume_exact(basis: &[Vec<BigRational>]) -> Result<BigRational> {
    let m = RatMatrix::from_rows(basis.to_vec())?;
    let d = m.determinant().abs();
    if d.is_zero() {
        return Err(LabError::pre("basis is rank-deficient"));
    }
    Ok(d)
}

/// Nonzero lattice vectors of length at most `radius`, with their integer
/// coordinates. Coefficients are bounded through the pseudo-inverse of the
/// basis: `|c_i| <= radius * |row_i(B^+)|`.
pub fn enumerate(basis: &[Vec<f64>], radius: f64, cap: usize) -> Result<Vec<(Vec<i64>, Vec<f64>)>> {
    let k = basis.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = basis[0].len();
    let b = DMatrix::from_fn(n, k, |i, j| basis[j][i]);
    let gram_inv = (b.transpose() * &b).try_inverse().ok_or(LabError::Singular)?;
    let pinv = gram_inv * b.transpose();
    let bounds: Vec<i64> = (0..k).map(|i| (radius * pinv.row(i).norm() + 1e-9).floor() as i64).collect();
    let boxed = bounds.iter().try_fold(1usize, |acc, &m| acc.checked_mul(2 * m as usize + 1));
    match boxed {
        Some(c) if c <= cap => {}
        _ => return Err(LabError::CapExceeded { cap }),
    }
    let limit = radius * (1.0 + 1e-12) + 1e-15;
    let mut out = Vec::new();
    let mut c: Vec<i64> = bounds.iter().map(|m| -m).collect();
    loop {
        if c.iter().any(|&x| x != 0) {
            let mut v = vec![0.0; n];
            for (ci, bi) in c.iter().zip(basis) {
                v = axpy(&v, *ci as f64, bi);
            }
            if norm(&v) <= limit {
                out.push((c.clone(), v));
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
    }
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    for i in 0..k {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / dot(&star[j], &star[j]);
            v = axpy(&v, -mu[i][j], &star[j]);
        }
        star.push(v);
    }
    (star, mu)
}

/// LLL reduction with parameter `delta`.
pub fn lll(mut b: Vec<Vec<f64>>, delta: f64) -> Vec<Vec<f64>> {
    let k = b.len();
    let mut i = 1;
    let mut guard = 0;
    while i < k && guard < 100_000 {
        guard += 1;
        for j in (0..i).rev() {
            let (_, mu) = gram_schmidt(&b);
            let q = mu[i][j].round();
            if q != 0.0 {
                b[i] = axpy(&b[i], -q, &b[j]);
            }
        }
        let (star, mu) = gram_schmidt(&b);
        let lhs = dot(&star[i], &star[i]);
        if lhs >= (delta - mu[i][i - 1].powi(2)) * dot(&star[i - 1], &star[i - 1]) {
            i += 1;
        } else {
            b.swap(i, i - 1);
            i = (i - 1).max(1);
        }
    }
    b
}

/// Lagrange-Gauss reduction of a pair: `|b1| <= |b2|` and
/// `|<b1, b2>| <= |b1|^2 / 2`.
pub fn gauss_reduce(mut b1: Vec<f64>, mut b2: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    if norm(&b1) > norm(&b2) {
        std::mem::swap(&mut b1, &mut b2);
    }
    for _ in 0..10_000 {
        let q = (dot(&b1, &b2) / dot(&b1, &b1)).round();
        b2 = axpy(&b2, -q, &b1);
        if norm(&b2) >= norm(&b1) {
            break;
        }
        std::mem::swap(&mut b1, &mut b2);
    }
    (b1, b2)
}

fn det_i64(m: &[Vec<i64>]) -> i128 {
    let k = m.len();
    if k == 1 {
        return m[0][0] as i128;
    }
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] as i128 * det_i64(&minor)
        })
        .sum()
}

/// Reduced basis: Lagrange-Gauss for rank 2, otherwise LLL followed by a
/// greedy pass that replaces each vector by the shortest enumerated vector
/// keeping the coefficient matrix unimodular. In R^2 the result is put in
/// the canonical planar form (see [`planar_canonical`]); otherwise each
/// vector is sign-normalized.
pub fn reduce_basis(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = basis.len();
    let mut out = match k {
        0 => return Ok(Vec::new()),
        1 => basis.to_vec(),
        2 => {
            let (a, b) = gauss_reduce(basis[0].clone(), basis[1].clone());
            vec![a, b]
        }
        _ => greedy(&lll(basis.to_vec(), 0.99)),
    };
    if k == 2 && out[0].len() == 2 {
        return planar_canonical(&out);
    }
    out.iter_mut().for_each(|v| sign_normalize(v));
    Ok(out)
}

fn greedy(b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = b.len();
    let longest = b.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let Ok(mut cands) = enumerate(b, longest * (1.0 + REL_TOL), ENUM_CAP) else {
        // too skewed to enumerate; the LLL basis stands
        let mut out = b.to_vec();
        out.sort_by(|x, y| norm(x).total_cmp(&norm(y)));
        return out;
    };
    cands.sort_by(|x, y| norm(&x.1).total_cmp(&norm(&y.1)));
    let mut coeffs: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    let mut out = b.to_vec();
    for i in 0..k {
        for (c, v) in &cands {
            let mut trial = coeffs.clone();
            trial[i] = c.clone();
            if det_i64(&trial).abs() == 1 {
                coeffs = trial;
                out[i] = v.clone();
                break;
            }
        }
    }
    out.sort_by(|x, y| norm(x).total_cmp(&norm(y)));
    out
}

fn angle(v: &[f64]) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn cross(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Canonical basis of a lattice in R^2: `b1` is the minimal vector of least
/// angle in `[0, 2 pi)`; `b2` is the shortest vector with `det(b1, b2)`
/// equal to the covolume, ties again broken by least angle.
pub fn planar_canonical(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let (a, b) = gauss_reduce(basis[0].clone(), basis[1].clone());
    let covol = cross(&a, &b).abs();
    let pts = enumerate(&[a.clone(), b.clone()], norm(&b) * (1.0 + REL_TOL), ENUM_CAP)?;
    let l1 = norm(&a);
    let least_angle = |vs: Vec<&Vec<f64>>| -> Option<Vec<f64>> {
        vs.into_iter().min_by(|x, y| angle(x).total_cmp(&angle(y))).cloned()
    };
    let b1 = least_angle(pts.iter().map(|p| &p.1).filter(|v| norm(v) <= l1 * (1.0 + REL_TOL)).collect())
        .ok_or(LabError::Singular)?;
    let second: Vec<&Vec<f64>> =
        pts.iter().map(|p| &p.1).filter(|v| (cross(&b1, v) - covol).abs() <= REL_TOL * covol.max(1e-300)).collect();
    let l2 = second.iter().map(|v| norm(v)).fold(f64::INFINITY, f64::min);
    let b2 = least_angle(second.into_iter().filter(|v| norm(v) <= l2 * (1.0 + REL_TOL)).collect())
        .ok_or(LabError::Singular)?;
    Ok(vec![b1, b2])
}

#[derive(Debug, Clone, Serialize)]
pub struct ShortestVector {
    pub length: f64,
    pub vector: Vec<f64>,
    /// All vectors of minimal length (both signs).
    pub minimal_vectors: Vec<Vec<f64>>,
}

/// Shortest nonzero vector, certified by enumeration in the ball whose radius
/// is the first vector of an LLL-reduced basis.
pub fn shortest_vector(basis: &[Vec<f64>]) -> Result<ShortestVector> {
    if basis.is_empty() {
        return Err(LabError::Empty("basis".into()));
    }
    let reduced = lll(basis.to_vec(), 0.99);
    let r = reduced.iter().map(|v| norm(v)).fold(f64::INFINITY, f64::min);
    let pts = enumerate(&reduced, r * (1.0 + REL_TOL), ENUM_CAP)?;
    let length = pts.iter().map(|p| norm(&p.1)).fold(f64::INFINITY, f64::min);
    let mut minimal_vectors: Vec<Vec<f64>> =
        pts.into_iter().map(|p| p.1).filter(|v| norm(v) <= length * (1.0 + REL_TOL)).collect();
    minimal_vectors.sort_by(|x, y| angle_key(x).partial_cmp(&angle_key(y)).unwrap_or(std::cmp::Ordering::Equal));
    let mut vector = minimal_vectors[0].clone();
    sign_normalize(&mut vector);
    Ok(ShortestVector { length, vector, minimal_vectors })
}

fn angle_key(v: &[f64]) -> Vec<f64> {
    if v.len() == 2 {
        vec![angle(v)]
    } else {
        v.iter().map(|x| -x).collect()
    }
}

/// A centered open candidate set `K` for the supremum formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CandidateSet {
    /// Axis-parallel open box with the given half widths.
    Box { half_widths: Vec<f64> },
    /// Open Euclidean ball.
    Disk { radius: f64 },
}

fn ball_volume(n: usize, r: f64) -> f64 {
    let unit = match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => PI * PI / 2.0,
    };
    unit * r.powi(n as i32)
}

impl CandidateSet {
    pub fn volume(&self, n: usize) -> f64 {
        match self {
            CandidateSet::Box { half_widths } => half_widths.iter().map(|w| 2.0 * w).product(),
            CandidateSet::Disk { radius } => ball_volume(n, *radius),
        }
    }

    /// `(K - K) cap L = {0}`. For a centered box, `K - K` is the box of
    /// doubled half widths; for a ball, the ball of doubled radius.
    pub fn admissible(&self, basis: &[Vec<f64>]) -> Result<bool> {
        match self {
            CandidateSet::Box { half_widths } => {
                let reach = 2.0 * norm(half_widths);
                let pts = enumerate(basis, reach, ENUM_CAP)?;
                Ok(!pts.iter().any(|(_, v)| v.iter().zip(half_widths).all(|(x, w)| x.abs() < 2.0 * w)))
            }
            CandidateSet::Disk { radius } => {
                let pts = enumerate(basis, 2.0 * radius, ENUM_CAP)?;
                Ok(!pts.iter().any(|(_, v)| norm(v) < 2.0 * radius))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SupFormulaReport {
    pub covolume: f64,
    pub volumes: Vec<f64>,
    pub admissible: Vec<bool>,
    /// Largest admissible volume (0 if none).
    pub best_volume: f64,
    pub best_index: Option<usize>,
    /// `covolume - best_volume`.
    pub gap: f64,
    /// `best_volume <= covolume` up to roundoff.
    pub consistent: bool,
}

/// Best measure among candidates `K` with `(K - K) cap L = {0}`, to be
/// compared with `vol(R^n / L) = sup mu(K)`.
pub fn sup_formula_check(basis: &[Vec<f64>], candidates: &[CandidateSet]) -> Result<SupFormulaReport> {
    let covol = covolume(basis)?;
    let n = basis.len();
    let admissible = candidates.iter().map(|c| c.admissible(basis)).collect::<Result<Vec<_>>>()?;
    let volumes: Vec<f64> = candidates.iter().map(|c| c.volume(n)).collect();
    let best_index =
        (0..candidates.len()).filter(|&i| admissible[i]).max_by(|&i, &j| volumes[i].total_cmp(&volumes[j]));
    let best_volume = best_index.map_or(0.0, |i| volumes[i]);
    Ok(SupFormulaReport {
        covolume: covol,
        volumes,
        admissible,
        best_volume,
        best_index,
        gap: covol - best_volume,
        consistent: best_volume <= covol * (1.0 + 1e-9),
    })
}

/// Sweep of admissible boxes for a planar lattice: for each width `w1` the
/// largest admissible `w2` is `min |x2| / 2` over lattice points with
/// `|x1| < 2 w1`.
pub fn box_sweep(basis: &[Vec<f64>], steps: usize) -> Result<Vec<CandidateSet>> {
    if basis.len() != 2 {
        return Err(LabError::pre("box sweep is planar"));
    }
    let covol = covolume(basis)?;
    let span = 2.0 * basis.iter().map(|b| norm(b)).fold(0.0, f64::max);
    let mut out = Vec::with_capacity(steps);
    for k in 1..=steps {
        let w1 = span * k as f64 / steps as f64;
        // an admissible box has volume at most the covolume, bounding w2
        let w2_max = covol / (4.0 * w1);
        let reach = 2.0 * (w1 * w1 + w2_max * w2_max).sqrt();
        let pts = enumerate(basis, reach, ENUM_CAP)?;
        let w2 =
            pts.iter().filter(|(_, v)| v[0].abs() < 2.0 * w1).map(|(_, v)| v[1].abs() / 2.0).fold(w2_max, f64::min);
        if w2 > 0.0 {
            out.push(CandidateSet::Box { half_widths: vec![w1, w2] });
        }
    }
    Ok(out)
}

/// One affine slice `c + (V cap ball)` of a truncation; `c` is a point of the
/// discrete part and the slice is a ball of radius `rho` in `c + V`.
struct Slice<'a> {
    c: Vec<f64>,
    rho: f64,
    v: &'a [Vec<f64>],
}

impl Slice<'_> {
    fn distance(&self, p: &[f64]) -> f64 {
        if self.v.is_empty() {
            return dist(p, &self.c);
        }
        let u = project_onto(p, self.v);
        let nu = norm(&u);
        let u = if nu > self.rho { u.iter().map(|x| x * self.rho / nu).collect() } else { u };
        let q: Vec<f64> = self.c.iter().zip(&u).map(|(a, b)| a + b).collect();
        dist(p, &q)
    }

    /// Grid samples of the slice, with points outside the ball pushed to its
    /// boundary sphere.
    fn samples(&self) -> Vec<Vec<f64>> {
        let d = self.v.len();
        if d == 0 {
            return vec![self.c.clone()];
        }
        let m: usize = match d {
            1 => 1025,
            2 => 129,
            3 => 33,
            _ => 17,
        };
        let mut out = Vec::new();
        let mut idx = vec![0usize; d];
        loop {
            let t: Vec<f64> = idx.iter().map(|&i| self.rho * (2.0 * i as f64 / (m - 1) as f64 - 1.0)).collect();
            let nt = norm(&t);
            let t: Vec<f64> = if nt > self.rho { t.iter().map(|x| x * self.rho / nt).collect() } else { t };
            let mut p = self.c.clone();
            for (ti, e) in t.iter().zip(self.v) {
                p = axpy(&p, *ti, e);
            }
            out.push(p);
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                idx[i] += 1;
                if idx[i] < m {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }
}

fn truncation(h: &EuclideanLatticeSubgroup, r: f64) -> Result<Vec<Slice<'_>>> {
    Ok(h.discrete_points(r)?
        .into_iter()
        .map(|c| {
            let rho = (r * r - dot(&c, &c)).max(0.0).sqrt();
            Slice { c, rho, v: &h.connected }
        })
        .collect())
}

fn directed(a: &[Slice<'_>], b: &[Slice<'_>]) -> f64 {
    a.par_iter()
        .flat_map_iter(|s| s.samples())
        .map(|p| b.iter().map(|t| t.distance(&p)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// Generator of a one-dimensional subgroup: `None` for R, `Some(0)` for
/// `{0}`, `Some(a)` for `aZ`.
fn line_generator(h: &EuclideanLatticeSubgroup) -> Option<f64> {
    if !h.connected.is_empty() {
        None
    } else {
        Some(h.discrete.first().map_or(0.0, |b| b[0].abs()))
    }
}

/// Hausdorff distance between the truncations `H1 cap B_R` and `H2 cap B_R`.
///
/// The ball is closed and enlarged by a relative `1e-12` so that lattice
/// points exactly on the sphere survive roundoff. Both truncations contain 0,
/// so neither is ever empty. The value is exact when both subgroups are
/// discrete and in dimension one; when a connected part is present in
/// dimension two or more it is computed on a grid of the continuous slices
/// (spacing `2R/1024` for lines, coarser in higher dimension), so it is a
/// lower estimate accurate to that spacing.
pub fn chabauty_distance(h1: &EuclideanLatticeSubgroup, h2: &EuclideanLatticeSubgroup, r: f64) -> Result<f64> {
    if h1.dim != h2.dim {
        return Err(LabError::DimensionMismatch { expected: h1.dim, found: h2.dim });
    }
    if !(r > 0.0) {
        return Err(LabError::pre("truncation radius must be positive"));
    }
    let r = r * (1.0 + 1e-12);
    if h1.dim == 1 {
        return line_distance(line_generator(h1), line_generator(h2), r);
    }
    let (t1, t2) = (truncation(h1, r)?, truncation(h2, r)?);
    Ok(directed(&t1, &t2).max(directed(&t2, &t1)))
}

fn grid_points(a: f64, r: f64) -> Result<Vec<f64>> {
    if a == 0.0 {
        return Ok(vec![0.0]);
    }
    let m = (r / a).floor() as i64;
    if 2 * m as usize + 1 > ENUM_CAP {
        return Err(LabError::CapExceeded { cap: ENUM_CAP });
    }
    Ok((-m..=m).map(|k| k as f64 * a).collect())
}

fn directed_sorted(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .map(|&x| {
            let i = b.partition_point(|&y| y < x);
            let right = b.get(i).map_or(f64::INFINITY, |y| y - x);
            let left = if i > 0 { x - b[i - 1] } else { f64::INFINITY };
            right.min(left)
        })
        .fold(0.0, f64::max)
}

fn line_distance(g1: Option<f64>, g2: Option<f64>, r: f64) -> Result<f64> {
    match (g1, g2) {
        (None, None) => Ok(0.0),
        (None, Some(a)) | (Some(a), None) => {
            // farthest point of [-R, R] from the grid aZ cap [-R, R]
            let m = if a == 0.0 { 0.0 } else { (r / a).floor() };
            if m == 0.0 {
                Ok(r)
            } else {
                Ok((a / 2.0).max(r - m * a))
            }
        }
        (Some(a), Some(b)) => {
            let (p, q) = (grid_points(a, r)?, grid_points(b, r)?);
            Ok(directed_sorted(&p, &q).max(directed_sorted(&q, &p)))
        }
    }
}

/// A sequence of closed subgroups indexed from 1.
pub trait SubgroupSequence: Sync {
    fn term(&self, k: u64) -> Result<EuclideanLatticeSubgroup>;
}

impl<F> SubgroupSequence for F
where
    F: Fn(u64) -> Result<EuclideanLatticeSubgroup> + Sync,
{
    fn term(&self, k: u64) -> Result<EuclideanLatticeSubgroup> {
        self(k)
    }
}

/// Named example sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `(1/k) Z`.
    InverseIntegers,
    /// `k Z`.
    Multiples,
    /// `Z (cos(1/k), sin(1/k))` in R^2.
    RotatingLine,
    /// `Z` for odd `k`, `2Z` for even `k`.
    Alternating,
}

impl Family {
    pub const NAMES: &'static [&'static str] = &["inverse-integers", "multiples", "rotating-line", "alternating"];

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "inverse-integers" => Family::InverseIntegers,
            "multiples" => Family::Multiples,
            "rotating-line" => Family::RotatingLine,
            "alternating" => Family::Alternating,
            _ => return Err(LabError::pre(format!("unknown family {name:?}; known: {:?}", Self::NAMES))),
        })
    }
}

impl SubgroupSequence for Family {
    fn term(&self, k: u64) -> Result<EuclideanLatticeSubgroup> {
        let k = k.max(1) as f64;
        match self {
            Family::InverseIntegers => EuclideanLatticeSubgroup::lattice(&[vec![1.0 / k]]),
            Family::Multiples => EuclideanLatticeSubgroup::lattice(&[vec![k]]),
            Family::RotatingLine => EuclideanLatticeSubgroup::new(2, &[], &[vec![(1.0 / k).cos(), (1.0 / k).sin()]]),
            Family::Alternating => {
                EuclideanLatticeSubgroup::lattice(&[vec![if k as u64 % 2 == 1 { 1.0 } else { 2.0 }]])
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusCheck {
    pub radius: f64,
    pub indices: Vec<u64>,
    pub distances: Vec<f64>,
    /// Distances never increase along the index ladder.
    pub monotone: bool,
    pub final_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChabautyLimit {
    pub limit: EuclideanLatticeSubgroup,
    pub probe: u64,
    /// Basis vectors that shrank into the connected part.
    pub merged: usize,
    /// Basis vectors that left every truncation ball.
    pub escaped: usize,
    pub checks: Vec<RadiusCheck>,
    /// Final distance at most `tol` for every radius.
    pub converged: bool,
}

/// Default probe index for [`chabauty_limit`].
pub const DEFAULT_PROBE: u64 = 10_000_000;

fn ladder(probe: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 1u64;
    while p < probe {
        for m in [1, 2, 5] {
            if p * m < probe {
                out.push(p * m);
            }
        }
        p *= 10;
    }
    out.push(probe);
    out
}

fn snap(v: &[f64], tol: f64) -> Vec<f64> {
    v.iter().map(|&x| if x.abs() < tol { 0.0 } else { x }).collect()
}

/// Proposes the limit of a sequence from its canonical data at indices
/// `probe, probe + 1, probe + 2`: basis vectors shorter than [`MERGE_TOL`]
/// in all three merge into the connected part, vectors longer than twice
/// the largest radius escape, and the rest must agree to `tol`. The proposal
/// is then checked by truncation distances along an index ladder for each
/// radius.
pub fn chabauty_limit<S: SubgroupSequence + ?Sized>(
    seq: &S,
    radii: &[f64],
    tol: f64,
    probe: u64,
) -> Result<ChabautyLimit> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(LabError::pre("radii must be positive and nonempty"));
    }
    if probe < 1 {
        return Err(LabError::pre("probe index must be at least 1"));
    }
    let terms = [seq.term(probe)?, seq.term(probe + 1)?, seq.term(probe + 2)?];
    let dim = terms[0].dim;
    let escape = 2.0 * radii.iter().cloned().fold(0.0, f64::max);
    let no_limit = |witness: String| LabError::NoLimit { tol, witness };
    for t in &terms[1..] {
        if t.connected.len() != terms[0].connected.len() || t.discrete.len() != terms[0].discrete.len() {
            return Err(no_limit(format!(
                "shape changes between terms {probe} and later: {:?} vs {:?}",
                terms[0].discrete, t.discrete
            )));
        }
    }
    let mut merge_dirs = terms[0].connected.clone();
    let mut bounded = Vec::new();
    let (mut merged, mut escaped) = (0, 0);
    for (i, b) in terms[0].discrete.iter().enumerate() {
        let lens: Vec<f64> = terms.iter().map(|t| norm(&t.discrete[i])).collect();
        if lens.iter().all(|&l| l < MERGE_TOL) {
            merge_dirs.push(b.clone());
            merged += 1;
        } else if lens.iter().all(|&l| l > escape) {
            escaped += 1;
        } else if lens.iter().any(|&l| l < MERGE_TOL || l > escape) {
            return Err(no_limit(format!("basis vector {i} has lengths {lens:?} across terms {probe}..")));
        } else {
            for (j, t) in terms.iter().enumerate().skip(1) {
                let d = dist(b, &t.discrete[i]);
                if d > tol * lens[0].max(1.0) {
                    return Err(no_limit(format!(
                        "basis vector {i} moves by {d:e} between terms {probe} and {}: {:?} vs {:?}",
                        probe + j as u64,
                        b,
                        t.discrete[i]
                    )));
                }
            }
            bounded.push(snap(b, tol));
        }
    }
    let merge_dirs: Vec<Vec<f64>> = merge_dirs.iter().map(|v| snap(&orthonormal(&[v.clone()], 0.0)[0], tol)).collect();
    let limit = EuclideanLatticeSubgroup::new(dim, &merge_dirs, &bounded)?;
    let indices = ladder(probe);
    let checks = radii
        .par_iter()
        .map(|&r| {
            let distances =
                indices.iter().map(|&k| chabauty_distance(&seq.term(k)?, &limit, r)).collect::<Result<Vec<f64>>>()?;
            let monotone = distances.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            Ok(RadiusCheck {
                radius: r,
                indices: indices.clone(),
                final_distance: *distances.last().expect("ladder is nonempty"),
                distances,
                monotone,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let converged = checks.iter().all(|c| c.final_distance <= tol);
    Ok(ChabautyLimit { limit, probe, merged, escaped, checks, converged })
}

/// `gamma_n^n` (Hermite constant to the `n`) for `n <= 4`.
fn hermite_power(n: usize) -> f64 {
    match n {
        1 => 1.0,
        2 => 4.0 / 3.0,
        3 => 2.0,
        _ => 4.0,
    }
}

/// Bound on the vectors of a reduced basis of a lattice with covolume at most
/// `v` and no nonzero vector shorter than `r`.
///
/// Minkowski's second theorem gives `l1 ... ln <= gamma_n^(n/2) covol` for the
/// successive minima; with `l1 >= r` this bounds `ln` by
/// `gamma_n^(n/2) v / r^(n-1)`. An LLL-reduced vector is at most
/// `2^((n-1)/2)` times the matching minimum, which gives the returned bound.
pub fn reduced_basis_bound(n: usize, v: f64, r: f64) -> f64 {
    2f64.powf((n as f64 - 1.0) / 2.0) * hermite_power(n).sqrt() * v / r.powi(n as i32 - 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct MahlerReport {
    /// Indices of the extracted subsequence, increasing.
    pub indices: Vec<usize>,
    /// Canonical basis at the last index of the subsequence.
    pub limit: Vec<Vec<f64>>,
    pub limit_covolume: f64,
    pub limit_shortest: f64,
    pub bound: f64,
    /// Spread of the subsequence's canonical bases (max coordinate range).
    pub spread: f64,
    pub verified: bool,
}

fn canonical_lattice(b: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    reduce_basis(b)
}

/// Extracts a subsequence with converging reduced bases from lattices of
/// covolume at most `v` and shortest vector at least `r`.
///
/// Reduced bases lie in the box `[-B, B]^(n^2)` with `B` from
/// [`reduced_basis_bound`]; the box is bisected coordinate by coordinate,
/// keeping the half holding more terms (ties go to the half with the later
/// term), until every side is below `cell` or a further split would leave a
/// single term.
pub fn mahler_subsequence(seq: &[Vec<Vec<f64>>], v: f64, r: f64, cell: f64) -> Result<MahlerReport> {
    if seq.is_empty() {
        return Err(LabError::Empty("sequence".into()));
    }
    if !(v > 0.0 && r > 0.0 && cell > 0.0) {
        return Err(LabError::pre("v, r and the cell size must be positive"));
    }
    let n = seq[0].len();
    let mut bases = Vec::with_capacity(seq.len());
    for (index, b) in seq.iter().enumerate() {
        let reject = |reason: String| LabError::Rejected { index, reason };
        if b.len() != n || b.iter().any(|x| x.len() != n) {
            return Err(reject(format!("not a basis of R^{n}")));
        }
        let c = covolume(b).map_err(|e| reject(e.to_string()))?;
        if c > v * (1.0 + 1e-12) {
            return Err(reject(format!("covolume {c} exceeds {v}")));
        }
        let s = shortest_vector(b)?.length;
        if s < r * (1.0 - 1e-12) {
            return Err(reject(format!("shortest vector {s} is below {r}")));
        }
        bases.push(canonical_lattice(b)?);
    }
    let bound = reduced_basis_bound(n, v, r);
    let flat: Vec<Vec<f64>> = bases.iter().map(|b| b.concat()).collect();
    if let Some(i) = flat.iter().position(|p| p.iter().any(|x| x.abs() > bound * (1.0 + 1e-9))) {
        return Err(LabError::Domain(format!("reduced basis {i} exceeds the bound {bound}")));
    }
    let d = n * n;
    let mut lo = vec![-bound; d];
    let mut hi = vec![bound; d];
    let mut members: Vec<usize> = (0..seq.len()).collect();
    let mut axis = 0;
    let mut stalled = 0;
    while stalled < d {
        if hi[axis] - lo[axis] < cell {
            stalled += 1;
            axis = (axis + 1) % d;
            continue;
        }
        stalled = 0;
        let mid = 0.5 * (lo[axis] + hi[axis]);
        let (left, right): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| flat[i][axis] < mid);
        let take_left = left.len() > right.len()
            || (left.len() == right.len() && left.last().copied().unwrap_or(0) > right.last().copied().unwrap_or(0));
        let chosen = if take_left { left } else { right };
        if chosen.len() < 2 {
            break;
        }
        if take_left {
            hi[axis] = mid;
        } else {
            lo[axis] = mid;
        }
        members = chosen;
        axis = (axis + 1) % d;
    }
    let spread = (0..d)
        .map(|c| {
            let vals = members.iter().map(|&i| flat[i][c]);
            vals.clone().fold(f64::NEG_INFINITY, f64::max) - vals.fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let last = *members.last().expect("at least one member");
    let limit = bases[last].clone();
    let limit_covolume = covolume(&limit)?;
    let limit_shortest = shortest_vector(&limit)?.length;
    let tol = 1e-9;
    Ok(MahlerReport {
        indices: members,
        verified: limit_covolume <= v + tol && limit_shortest >= r - tol,
        limit,
        limit_covolume,
        limit_shortest,
        bound,
        spread,
    })
}

/// `Z^2` rotated by `theta`.
pub fn rotated_square(theta: f64) -> Vec<Vec<f64>> {
    let (s, c) = theta.sin_cos();
    vec![vec![c, s], vec![-s, c]]
}

/// `Z^2` rotated by `1/k`, `k = 1..=count`.
pub fn rotating_square_family(count: usize) -> Vec<Vec<Vec<f64>>> {
    (1..=count).map(|k| rotated_square(1.0 / k as f64)).collect()
}

/// Unimodular lattices `diag(1/k, k)`: covolume 1, shortest vector `1/k`.
pub fn shrinking_family(count: usize) -> Vec<Vec<Vec<f64>>> {
    (1..=count).map(|k| vec![vec![1.0 / k as f64, 0.0], vec![0.0, k as f64]]).collect()
}
