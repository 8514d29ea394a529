//! Isometries of R^n: min-sets, fixed points, commuting families and the
//! translation/point-group structure of crystallographic groups.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::collections::HashSet;

use crate::error::{LabError, Result};
use crate::lattice_lab::{FinitelyGeneratedGroup, Isometry};
use crate::linalg::{lstsq, null_space, numerical_rank, orthonormalize, projector};

/// Entrywise tolerance for matrix equality after canonicalization.
pub const MATRIX_EQ_TOL: f64 = 1e-8;
const NULL_TOL: f64 = 1e-9;
/// Smallest nonzero singular value of `O - I` below which a fixed-point solve
/// is reported as ill-conditioned.
const ILL_CONDITIONED: f64 = 1e-6;

/// `x -> O x + t` with `O` orthogonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuclideanIsometry {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
}

impl EuclideanIsometry {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = linear.nrows();
        if linear.ncols() != n {
            return Err(LabError::DimensionMismatch { expected: n, found: linear.ncols() });
        }
        if translation.len() != n {
            return Err(LabError::DimensionMismatch { expected: n, found: translation.len() });
        }
        let defect = (linear.transpose() * &linear - DMatrix::<f64>::identity(n, n)).norm();
        if defect > 1e-9 {
            return Err(LabError::pre(format!("linear part is not orthogonal (defect {defect:e})")));
        }
        Ok(Self { linear, translation })
    }

    pub fn translation(v: &[f64]) -> Self {
        let n = v.len();
        Self { linear: DMatrix::identity(n, n), translation: DVector::from_column_slice(v) }
    }

    pub fn identity(n: usize) -> Self {
        Self::translation(&vec![0.0; n])
    }

    /// Rotation by `theta` about `center` in R^2.
    pub fn rotation2(theta: f64, center: [f64; 2]) -> Self {
        let (s, c) = theta.sin_cos();
        let o = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let p = DVector::from_column_slice(&center);
        let t = &p - &o * &p;
        Self { linear: o, translation: t }
    }

    /// Rotation by `theta` about the z-axis followed by translation `shift e3`.
    pub fn screw_z(theta: f64, shift: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let o = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        Self { linear: o, translation: DVector::from_column_slice(&[0.0, 0.0, shift]) }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.translation
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let ot = self.linear.transpose();
        let t = -(&ot * &self.translation);
        Self { linear: ot, translation: t }
    }

    pub fn displacement(&self, x: &DVector<f64>) -> f64 {
        (self.apply(x) - x).norm()
    }

    pub fn is_pure_translation(&self) -> bool {
        let n = self.dim();
        (&self.linear - DMatrix::<f64>::identity(n, n)).amax() <= MATRIX_EQ_TOL
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (&self.linear - &other.linear).amax() <= tol && (&self.translation - &other.translation).amax() <= tol
    }

    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        self.compose(other).approx_eq(&other.compose(self), tol)
    }
}

/// `base + span(directions)`, directions stored as orthonormal columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineSubspace {
    pub base: DVector<f64>,
    pub directions: DMatrix<f64>,
}

impl AffineSubspace {
    pub fn whole(n: usize) -> Self {
        Self { base: DVector::zeros(n), directions: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Nearest-point projection.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let p = projector(&self.directions, self.ambient_dim());
        &self.base + p * (x - &self.base)
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        (self.project(x) - x).norm() <= tol
    }

    pub fn contains_subspace(&self, other: &AffineSubspace, tol: f64) -> bool {
        if !self.contains(&other.base, tol) {
            return false;
        }
        let p = projector(&self.directions, self.ambient_dim());
        other.directions.column_iter().all(|d| (&p * d - d).norm() <= tol)
    }
}

/// The min-set of an isometry and the translation it induces there.
#[derive(Debug, Clone, Serialize)]
pub struct MinSet {
    pub subspace: AffineSubspace,
    pub translation: DVector<f64>,
}

impl MinSet {
    pub fn translation_length(&self) -> f64 {
        self.translation.norm()
    }
}

/// `min(g)`: the fixed directions of `O` span the subspace, `g` translates it
/// by the component of `t` along them, and the base point solves
/// `(O - I) x = -t_perp` on the orthogonal complement.
pub fn min_set(g: &EuclideanIsometry) -> MinSet {
    let n = g.dim();
    let a = &g.linear - DMatrix::<f64>::identity(n, n);
    let fixed_dirs = null_space(&a, NULL_TOL);
    let p = projector(&fixed_dirs, n);
    let t_par = &p * &g.translation;
    let t_perp = &g.translation - &t_par;
    let x = lstsq(&a, &(-t_perp), NULL_TOL);
    // Keep the base point in the complement for a canonical representative.
    let base = &x - &p * &x;
    MinSet { subspace: AffineSubspace { base, directions: fixed_dirs }, translation: t_par }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    pub has_fixed_point: bool,
    pub witness: Option<DVector<f64>>,
    /// `||(O - I) x + t||` at the least-squares solution.
    pub residual: f64,
    pub warning: Option<String>,
}

/// Decides solvability of `(O - I) x = -t`.
pub fn has_fixed_point(g: &EuclideanIsometry) -> FixedPointReport {
    let n = g.dim();
    let a = &g.linear - DMatrix::<f64>::identity(n, n);
    let x = lstsq(&a, &(-&g.translation), NULL_TOL);
    let residual = (&a * &x + &g.translation).norm();
    let sv = a.clone().svd(false, false).singular_values;
    let warning = sv
        .iter()
        .filter(|s| **s > NULL_TOL && **s < ILL_CONDITIONED)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(*s, |m| m.min(*s))))
        .map(|s| format!("O - I is ill-conditioned (singular value {s:e}); residual {residual:e}"));
    let fixed = residual <= 1e-8 * (1.0 + g.translation.norm());
    FixedPointReport { has_fixed_point: fixed, witness: fixed.then_some(x), residual, warning }
}

/// Common part of the min-sets of a commuting family of non-elliptic
/// isometries.
pub fn commuting_min_intersection(gs: &[EuclideanIsometry]) -> Result<AffineSubspace> {
    let first = gs.first().ok_or_else(|| LabError::Empty("no isometries given".into()))?;
    let n = first.dim();
    for (i, g) in gs.iter().enumerate() {
        if g.dim() != n {
            return Err(LabError::DimensionMismatch { expected: n, found: g.dim() });
        }
        if has_fixed_point(g).has_fixed_point {
            return Err(LabError::pre(format!("isometry {i} is elliptic")));
        }
        for (j, h) in gs.iter().enumerate().skip(i + 1) {
            if !g.commutes_with(h, 1e-8) {
                return Err(LabError::NotCommuting(format!("isometries {i} and {j}")));
            }
        }
    }
    // x lies in every min-set iff (I - P_k)(x - b_k) = 0 for all k.
    let sets: Vec<MinSet> = gs.iter().map(min_set).collect();
    let rows = n * sets.len();
    let mut a = DMatrix::<f64>::zeros(rows, n);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (k, m) in sets.iter().enumerate() {
        let q = DMatrix::<f64>::identity(n, n) - projector(&m.subspace.directions, n);
        let r = &q * &m.subspace.base;
        a.view_mut((k * n, 0), (n, n)).copy_from(&q);
        rhs.rows_mut(k * n, n).copy_from(&r);
    }
    let x = lstsq(&a, &rhs, NULL_TOL);
    let residual = (&a * &x - &rhs).norm();
    if residual > 1e-7 {
        return Err(LabError::pre(format!("min-sets do not intersect (residual {residual:e})")));
    }
    let directions = orthonormalize(&null_space(&a, 1e-9), 1e-9);
    let p = projector(&directions, n);
    let base = &x - &p * &x;
    Ok(AffineSubspace { base, directions })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrystalloReport {
    pub word_cutoff: usize,
    pub ball_size: usize,
    /// Rank of the lattice spanned by the pure translations found.
    pub translation_rank: usize,
    /// Size of the closure of the generators' linear parts.
    pub point_group_order: usize,
    /// Distinct linear parts seen in the word ball (a lower bound that
    /// stabilizes with the cutoff).
    pub observed_linear_parts: usize,
    /// `[Gamma : translations]` as observed.
    pub abelian_index: usize,
    /// Orders of the point-group elements.
    pub point_group_element_orders: Vec<usize>,
}

/// Default cap on word-ball size.
pub const DEFAULT_BALL_CAP: usize = 10_000;

/// Translation lattice and point group of the group generated by `gens`,
/// observed in the word ball of radius `word_cutoff`.
pub fn crystallographic_analysis(
    gens: &[EuclideanIsometry],
    word_cutoff: usize,
    point_group_cap: usize,
) -> Result<CrystalloReport> {
    if word_cutoff < 1 {
        return Err(LabError::pre("word cutoff must be at least 1"));
    }
    let group = FinitelyGeneratedGroup::new(gens.to_vec(), false, Some("crystallographic".into()))?;
    let n = group.dim_hint();
    let point_group = linear_closure(gens, point_group_cap)?;
    let ball = group.word_ball(word_cutoff, DEFAULT_BALL_CAP)?;

    let translations: Vec<DVector<f64>> = ball
        .elements()
        .filter(|g| g.is_pure_translation() && g.translation.norm() > MATRIX_EQ_TOL)
        .map(|g| g.translation.clone())
        .collect();
    let translation_rank =
        if translations.is_empty() { 0 } else { numerical_rank(&DMatrix::from_columns(&translations), 1e-9) };
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for g in ball.elements() {
        seen.insert(linear_key(&g.linear));
    }
    let orders = point_group.iter().map(|o| matrix_order(o, point_group_cap)).collect();
    Ok(CrystalloReport {
        word_cutoff,
        ball_size: ball.len(),
        translation_rank: translation_rank.min(n),
        point_group_order: point_group.len(),
        observed_linear_parts: seen.len(),
        abelian_index: seen.len(),
        point_group_element_orders: orders,
    })
}

fn linear_key(o: &DMatrix<f64>) -> Vec<i64> {
    o.iter().map(|x| (x * 1e6).round() as i64).collect()
}

fn matrix_order(o: &DMatrix<f64>, cap: usize) -> usize {
    let n = o.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut p = o.clone();
    for k in 1..=cap {
        if (&p - &id).amax() <= MATRIX_EQ_TOL {
            return k;
        }
        p = &p * o;
    }
    cap + 1
}

/// Closure of the linear parts under multiplication; an infinite closure
/// (irrational rotation) exceeds `cap`.
fn linear_closure(gens: &[EuclideanIsometry], cap: usize) -> Result<Vec<DMatrix<f64>>> {
    let n = gens.first().map(|g| g.dim()).unwrap_or(0);
    let mut elems = vec![DMatrix::<f64>::identity(n, n)];
    let mut keys: HashSet<Vec<i64>> = elems.iter().map(linear_key).collect();
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in gens {
                let b = &g.linear * a;
                if keys.insert(linear_key(&b)) {
                    elems.push(b.clone());
                    next.push(b);
                    if elems.len() > cap {
                        return Err(LabError::NotDiscrete(format!("point group closure exceeds {cap} elements")));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(elems)
}

impl Isometry for EuclideanIsometry {
    type Point = DVector<f64>;
    type Key = Vec<i64>;

    fn act(&self, p: &DVector<f64>) -> DVector<f64> {
        self.apply(p)
    }
    fn compose(&self, other: &Self) -> Self {
        EuclideanIsometry::compose(self, other)
    }
    fn inverse(&self) -> Self {
        EuclideanIsometry::inverse(self)
    }
    fn identity_like(&self) -> Self {
        Self::identity(self.dim())
    }
    fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::identity(self.dim()), tol)
    }
    fn key(&self) -> Vec<i64> {
        self.linear.iter().chain(self.translation.iter()).map(|x| (x * 1e6).round() as i64).collect()
    }
    fn distance(p: &DVector<f64>, q: &DVector<f64>) -> f64 {
        (p - q).norm()
    }
    fn dim_hint(&self) -> usize {
        self.dim()
    }
}
