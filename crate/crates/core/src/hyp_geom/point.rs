use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A point of the upper half-plane (`dim == 2`, real base) or upper half-space
/// (`dim == 3`, complex base) with positive height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub base: Complex<f64>,
    pub height: f64,
    dim: u8,
}

impl HPoint {
    pub fn plane(x: f64, y: f64) -> Result<Self> {
        Self::checked(Complex::new(x, 0.0), y, 2)
    }

    pub fn space(x1: f64, x2: f64, y: f64) -> Result<Self> {
        Self::checked(Complex::new(x1, x2), y, 3)
    }

    fn checked(base: Complex<f64>, height: f64, dim: u8) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() || !base.re.is_finite() || !base.im.is_finite() {
            return Err(LabError::InvalidPoint(format!("height must be positive and finite, got {height}")));
        }
        Ok(Self { base, height, dim })
    }

    pub(crate) fn raw(base: Complex<f64>, height: f64, dim: u8) -> Self {
        Self { base, height, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// The point `x + iy` of the upper half-plane.
    pub fn as_complex(&self) -> Complex<f64> {
        Complex::new(self.base.re, self.height)
    }

    pub fn coords(&self) -> Vec<f64> {
        if self.dim == 2 {
            vec![self.base.re, self.height]
        } else {
            vec![self.base.re, self.base.im, self.height]
        }
    }

    /// `cosh d(p, q) = 1 + (|z - w|^2 + (s - t)^2) / (2 s t)` in either model.
    pub fn cosh_distance(&self, other: &HPoint) -> f64 {
        let dz = (self.base - other.base).norm_sqr();
        let dh = self.height - other.height;
        1.0 + (dz + dh * dh) / (2.0 * self.height * other.height)
    }

    pub fn distance_to(&self, other: &HPoint) -> f64 {
        let c = self.cosh_distance(other);
        if c <= 1.0 {
            0.0
        } else {
            c.acosh()
        }
    }
}

/// Hyperbolic distance, validating both points.
pub fn distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    for pt in [p, q] {
        if !(pt.height > 0.0) {
            return Err(LabError::InvalidPoint(format!("height {} is not positive", pt.height)));
        }
    }
    if p.dim != q.dim {
        return Err(LabError::DimensionMismatch { expected: p.dim(), found: q.dim() });
    }
    Ok(p.distance_to(q))
}

/// A point at infinity of the upper half-plane/space model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Infinity,
    Finite(Complex<f64>),
}

impl BoundaryPoint {
    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => (a - b).norm() <= tol * (1.0 + a.norm()),
            // Very large finite points are numerically infinite.
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(z))
            | (BoundaryPoint::Finite(z), BoundaryPoint::Infinity) => z.norm() > 1.0 / tol,
        }
    }

    pub(crate) fn from_root(num: Complex<f64>, den: Complex<f64>) -> Self {
        if den.norm() <= 1e-14 * (1.0 + num.norm()) {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(num / den)
        }
    }
}

/// A point on the geodesic joining two boundary points (its "top" in the
/// half-space picture).
pub fn geodesic_apex(p: BoundaryPoint, q: BoundaryPoint, dim: usize) -> HPoint {
    let dim = dim as u8;
    match (p, q) {
        (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => HPoint::raw((a + b) * 0.5, (a - b).norm() * 0.5, dim),
        (BoundaryPoint::Finite(a), BoundaryPoint::Infinity) | (BoundaryPoint::Infinity, BoundaryPoint::Finite(a)) => {
            HPoint::raw(a, 1.0, dim)
        }
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => HPoint::raw(Complex::new(0.0, 0.0), 1.0, dim),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonpositive_height_is_rejected() {
        assert!(matches!(HPoint::plane(0.0, 0.0), Err(LabError::InvalidPoint(_))));
        assert!(matches!(HPoint::space(0.0, 1.0, -2.0), Err(LabError::InvalidPoint(_))));
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let p = HPoint::plane(0.0, 1.0).unwrap();
        let q = HPoint::space(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(distance(&p, &q), Err(LabError::DimensionMismatch { .. })));
    }
}
