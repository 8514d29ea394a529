//! Small dense linear-algebra helpers shared by the geometric modules, plus an
//! exact rational matrix type.

use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::hash::Hash;

use crate::error::{LabError, Result};

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// Frobenius distance from the identity.
pub fn dist_to_identity(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m - DMatrix::<f64>::identity(n, n)).norm()
}

/// SVD factors `(U, S, V^T)` of `m`, checked by recomposition.
///
/// The dynamic-size SVD occasionally returns inaccurate singular vectors for
/// matrices with repeated singular values; the factorization of `m^T` is then
/// used instead.
fn checked_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let err = |u: &DMatrix<f64>, s: &DVector<f64>, v_t: &DMatrix<f64>| (u * DMatrix::from_diagonal(s) * v_t - m).norm();
    let d = m.clone().svd(true, true);
    let (u, s, v_t) = (d.u.expect("requested U"), d.singular_values, d.v_t.expect("requested V^T"));
    let e = err(&u, &s, &v_t);
    if e <= 1e-12 * (1.0 + m.norm()) {
        return (u, s, v_t);
    }
    // m^T = U' S V'^T, so m = V' S U'^T
    let t = m.transpose().svd(true, true);
    let (tu, ts, tv_t) =
        (t.v_t.expect("requested V^T").transpose(), t.singular_values, t.u.expect("requested U").transpose());
    if err(&tu, &ts, &tv_t) < e {
        (tu, ts, tv_t)
    } else {
        (u, s, v_t)
    }
}

/// Orthonormal basis (as columns) of the null space of `m`, using singular
/// values below `tol`.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let ncols = m.ncols();
    // Pad to a square matrix so the SVD exposes a full right basis.
    let rows = m.nrows().max(ncols);
    let mut padded = DMatrix::<f64>::zeros(rows, ncols);
    padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
    let (_, sv, v_t) = checked_svd(&padded);
    let cols: Vec<DVector<f64>> =
        sv.iter().enumerate().filter(|(_, s)| **s <= tol).map(|(i, _)| v_t.row(i).transpose()).collect();
    if cols.is_empty() {
        DMatrix::zeros(ncols, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Numerical rank: singular values above `tol` relative to the largest.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max.max(1.0)).count()
}

/// Orthonormalizes the columns of `m` (modified Gram-Schmidt), dropping
/// columns that are dependent within `tol`.
pub fn orthonormalize(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in m.column_iter() {
        let mut v = c.into_owned();
        for b in &basis {
            let p = b.dot(&v);
            v -= b * p;
        }
        let n = v.norm();
        if n > tol {
            basis.push(v / n);
        }
    }
    if basis.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&basis)
    }
}

/// Orthogonal projector onto the column span of an orthonormal `basis`.
pub fn projector(basis: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if basis.ncols() == 0 {
        DMatrix::zeros(n, n)
    } else {
        basis * basis.transpose()
    }
}

/// Moore-Penrose least-squares solve of `a x = b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let (u, s, v_t) = checked_svd(a);
    let mut y = u.transpose() * b;
    for (yi, si) in y.iter_mut().zip(s.iter()) {
        *yi = if *si > tol { *yi / si } else { 0.0 };
    }
    v_t.transpose() * y
}

/// Square matrix with exact rational entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        Self { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(LabError::DimensionMismatch { expected: n, found: r.len() });
            }
            entries.extend(r);
        }
        Ok(Self { n, entries })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Self { n, entries }
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let f = &a[r * n + col] / &p;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero()).ok_or(LabError::Singular)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &p;
                inv[col * n + j] /= &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                    let t = &f * &inv[col * n + j];
                    inv[r * n + j] -= t;
                }
            }
        }
        Ok(Self { n, entries: inv })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }

    pub fn max_abs(&self) -> BigRational {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Group-element interface for invertible matrices, float or exact.
///
/// `key` is a hashable fingerprint used for deduplication: exact types use
/// themselves, float types round entries at `KEY_SCALE`.
pub trait MatrixElement: Clone + Send + Sync {
    type Key: Hash + Eq + Clone + Send + Sync;
    fn mul(&self, other: &Self) -> Self;
    fn try_inv(&self) -> Result<Self>;
    fn identity_like(&self) -> Self;
    /// Frobenius norm.
    fn norm(&self) -> f64;
    /// Frobenius distance to the identity.
    fn dist_to_identity(&self) -> f64;
    /// Exact types ignore `tol`.
    fn is_identity_within(&self, tol: f64) -> bool;
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    fn key(&self) -> Self::Key;
    fn is_exact(&self) -> bool {
        false
    }
}

pub const KEY_SCALE: f64 = 1e8;

fn round_key(x: f64) -> i64 {
    (x * KEY_SCALE).round() as i64
}

impl MatrixElement for DMatrix<f64> {
    type Key = Vec<i64>;
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn try_inv(&self) -> Result<Self> {
        self.clone().try_inverse().ok_or(LabError::Singular)
    }
    fn identity_like(&self) -> Self {
        DMatrix::identity(self.nrows(), self.ncols())
    }
    fn norm(&self) -> f64 {
        self.norm()
    }
    fn dist_to_identity(&self) -> f64 {
        dist_to_identity(self)
    }
    fn is_identity_within(&self, tol: f64) -> bool {
        dist_to_identity(self) <= tol
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.iter().zip(other.iter()).all(|(a, b)| (a - b).abs() <= tol)
    }
    fn key(&self) -> Vec<i64> {
        self.iter().map(|&x| round_key(x)).collect()
    }
}

impl MatrixElement for DMatrix<Complex<f64>> {
    type Key = Vec<i64>;
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn try_inv(&self) -> Result<Self> {
        self.clone().try_inverse().ok_or(LabError::Singular)
    }
    fn identity_like(&self) -> Self {
        DMatrix::identity(self.nrows(), self.ncols())
    }
    fn norm(&self) -> f64 {
        self.norm()
    }
    fn dist_to_identity(&self) -> f64 {
        let n = self.nrows();
        (self - DMatrix::<Complex<f64>>::identity(n, n)).norm()
    }
    fn is_identity_within(&self, tol: f64) -> bool {
        MatrixElement::dist_to_identity(self) <= tol
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.iter().zip(other.iter()).all(|(a, b)| (a - b).norm() <= tol)
    }
    fn key(&self) -> Vec<i64> {
        self.iter().flat_map(|z| [round_key(z.re), round_key(z.im)]).collect()
    }
}

impl MatrixElement for RatMatrix {
    type Key = RatMatrix;
    fn mul(&self, other: &Self) -> Self {
        RatMatrix::mul(self, other)
    }
    fn try_inv(&self) -> Result<Self> {
        self.inverse()
    }
    fn identity_like(&self) -> Self {
        RatMatrix::identity(self.n)
    }
    fn norm(&self) -> f64 {
        self.to_f64().norm()
    }
    fn dist_to_identity(&self) -> f64 {
        dist_to_identity(&self.to_f64())
    }
    fn is_identity_within(&self, _tol: f64) -> bool {
        self.is_identity()
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn key(&self) -> RatMatrix {
        self.clone()
    }
    fn is_exact(&self) -> bool {
        true
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rotation_minus_identity() {
        let o = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let ns = null_space(&(o - DMatrix::identity(3, 3)), 1e-9);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(2, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[7, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(m.determinant(), rat(1, 1));
    }

    #[test]
    fn singular_rational_matrix() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(m.inverse(), Err(LabError::Singular));
    }
}
