use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::point::{BoundaryPoint, HPoint};
use crate::error::{LabError, Result};

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    /// PSL(2, R) acting on the upper half-plane.
    Real,
    /// PSL(2, C) acting on upper half-space.
    Complex,
}

/// An orientation-preserving isometry of H^2 or H^3, stored as a determinant-one
/// matrix `[[a, b], [c, d]]` modulo sign.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusIsometry {
    m: [C64; 4],
    field: Field,
}

impl fmt::Debug for MoebiusIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            Field::Real => write!(f, "[[{}, {}], [{}, {}]]", self.m[0].re, self.m[1].re, self.m[2].re, self.m[3].re),
            Field::Complex => write!(f, "[[{}, {}], [{}, {}]]", self.m[0], self.m[1], self.m[2], self.m[3]),
        }
    }
}

impl MoebiusIsometry {
    /// Real matrix with positive determinant, rescaled to determinant one.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(LabError::pre(format!("real Moebius matrix needs positive determinant, got {det}")));
        }
        let s = det.sqrt();
        Ok(Self { m: [a / s, b / s, c / s, d / s].map(|x| C64::new(x, 0.0)), field: Field::Real }.canonical())
    }

    pub fn complex(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() <= 1e-300 || !det.re.is_finite() {
            return Err(LabError::Singular);
        }
        let s = det.sqrt();
        Ok(Self { m: [a / s, b / s, c / s, d / s], field: Field::Complex }.canonical())
    }

    /// Row-major 2x2 real entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(LabError::DimensionMismatch { expected: 2, found: rows.len() });
        }
        Self::real(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn identity(field: Field) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self { m: [one, zero, zero, one], field }
    }

    /// `z -> z + t`.
    pub fn translation(t: f64) -> Self {
        Self::real(1.0, t, 0.0, 1.0).expect("unipotent")
    }

    /// `z -> lambda z`, lambda > 0.
    pub fn dilation(lambda: f64) -> Result<Self> {
        let s = lambda.sqrt();
        Self::real(s, 0.0, 0.0, 1.0 / s)
    }

    /// Rotation about `i` by angle `2 theta` (half-angle convention).
    pub fn rotation_about_i(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::real(c, s, -s, c).expect("rotation has det 1")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> [C64; 4] {
        self.m
    }

    pub fn real_entries(&self) -> [f64; 4] {
        self.m.map(|z| z.re)
    }

    pub fn det(&self) -> C64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> C64 {
        self.m[0] + self.m[3]
    }

    /// Fixes the sign so the first non-negligible entry has positive real part
    /// (or, if purely imaginary, positive imaginary part).
    fn canonical(mut self) -> Self {
        let first = self.m.iter().find(|z| z.norm() > 1e-12).copied();
        if let Some(z) = first {
            let flip = z.re < -1e-12 || (z.re.abs() <= 1e-12 && z.im < 0.0);
            if flip {
                self.m = self.m.map(|x| -x);
            }
        }
        self
    }

    pub fn compose(&self, other: &Self) -> Self {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        let field =
            if self.field == Field::Complex || other.field == Field::Complex { Field::Complex } else { Field::Real };
        Self { m: [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], field }.canonical()
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self { m: [d, -b, -c, a], field: self.field }.canonical()
    }

    /// `h g h^{-1}`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    pub fn det_defect(&self) -> f64 {
        (self.det() - C64::new(1.0, 0.0)).norm()
    }

    /// Equality in PSL: identifies `m` and `-m`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let plus = self.m.iter().zip(other.m.iter()).all(|(x, y)| (x - y).norm() <= tol);
        let minus = self.m.iter().zip(other.m.iter()).all(|(x, y)| (x + y).norm() <= tol);
        plus || minus
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::identity(self.field), tol)
    }

    /// Frobenius distance to the identity, minimized over the sign.
    pub fn dist_to_identity(&self) -> f64 {
        let one = C64::new(1.0, 0.0);
        let plus =
            (self.m[0] - one).norm_sqr() + self.m[1].norm_sqr() + self.m[2].norm_sqr() + (self.m[3] - one).norm_sqr();
        let minus =
            (self.m[0] + one).norm_sqr() + self.m[1].norm_sqr() + self.m[2].norm_sqr() + (self.m[3] + one).norm_sqr();
        plus.min(minus).sqrt()
    }

    /// Real 2x2 matrix (for span computations); imaginary parts are dropped.
    pub fn to_real_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &self.real_entries())
    }

    /// Action on the upper half-plane / half-space.
    ///
    /// For `P = z + t j`: `g P = ((a z + b) conj(c z + d) + a conj(c) t^2 + t j) / (|c z + d|^2 + |c|^2 t^2)`.
    pub fn act(&self, p: &HPoint) -> HPoint {
        let [a, b, c, d] = self.m;
        let z = p.base;
        let t = p.height;
        let czd = c * z + d;
        let den = czd.norm_sqr() + c.norm_sqr() * t * t;
        let num = (a * z + b) * czd.conj() + a * c.conj() * (t * t);
        let dim = if self.field == Field::Complex { 3 } else { p.dim() as u8 };
        let mut base = num / den;
        if dim == 2 {
            base.im = 0.0;
        }
        HPoint::raw(base, t / den, dim)
    }

    pub fn apply(&self, p: &HPoint) -> Result<HPoint> {
        if self.field == Field::Complex && p.dim() == 2 {
            return Err(LabError::DimensionMismatch { expected: 3, found: 2 });
        }
        Ok(self.act(p))
    }

    /// Action on the boundary sphere.
    pub fn act_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        let [a, b, c, d] = self.m;
        match p {
            BoundaryPoint::Infinity => BoundaryPoint::from_root(a, c),
            BoundaryPoint::Finite(z) => BoundaryPoint::from_root(a * z + b, c * z + d),
        }
    }

    /// Rounded canonical entries, used as a hash key for deduplication.
    pub fn dedup_key(&self, scale: f64) -> [i64; 8] {
        let mut k = [0i64; 8];
        for (i, z) in self.m.iter().enumerate() {
            k[2 * i] = (z.re * scale).round() as i64;
            k[2 * i + 1] = (z.im * scale).round() as i64;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_determinant_and_sign() {
        let g = MoebiusIsometry::real(-2.0, 0.0, 0.0, -2.0).unwrap();
        assert!(g.det_defect() < 1e-12);
        assert!(g.is_identity(1e-12));
        assert!(g.real_entries()[0] > 0.0);
    }

    #[test]
    fn negative_determinant_rejected() {
        assert!(MoebiusIsometry::real(1.0, 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn action_matches_fractional_linear_formula() {
        let g = MoebiusIsometry::real(2.0, 1.0, 1.0, 1.0).unwrap();
        let p = HPoint::plane(0.3, 0.7).unwrap();
        let z = p.as_complex();
        let w = (z * 2.0 + 1.0) / (z + 1.0);
        let q = g.act(&p);
        assert!((q.as_complex() - w).norm() < 1e-12);
    }

    #[test]
    fn complex_isometry_rejects_plane_points() {
        let g =
            MoebiusIsometry::complex(C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
                .unwrap();
        let p = HPoint::plane(0.0, 1.0).unwrap();
        assert!(g.apply(&p).is_err());
    }
}
