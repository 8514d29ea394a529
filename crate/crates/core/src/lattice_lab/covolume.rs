use nalgebra::Complex;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::hyp_geom::{BoundaryPoint, HPoint};

/// Polygon vertex in the upper half-plane, possibly ideal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PolygonVertex {
    Interior(HPoint),
    Ideal(BoundaryPoint),
}

#[derive(Debug, Clone, Serialize)]
pub enum DomainSpec {
    /// `|x| <= 1/2, |z| >= 1`.
    Sl2zStandard,
    /// Convex geodesic polygon given by its vertices in cyclic order.
    Polygon(Vec<PolygonVertex>),
    /// Interior angles as exact multiples of pi.
    PolygonAngles(#[serde(serialize_with = "crate::serde_rational::many")] Vec<BigRational>),
    /// Closed orientable surface of genus `g >= 2`.
    Genus(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Covolume {
    pub value: f64,
    /// `value / pi` when it is known exactly.
    #[serde(serialize_with = "crate::serde_rational::opt")]
    pub pi_multiple: Option<BigRational>,
}

pub fn covolume_h2(spec: &DomainSpec) -> Result<Covolume> {
    match spec {
        DomainSpec::Sl2zStandard => Ok(Covolume { value: standard_domain_area(1e-12), pi_multiple: None }),
        DomainSpec::Polygon(vs) => {
            let n = vs.len();
            if n < 3 {
                return Err(LabError::pre("a polygon needs at least three vertices"));
            }
            if vs.iter().all(|v| matches!(v, PolygonVertex::Ideal(_))) {
                // every angle is exactly zero
                let m = BigRational::from_integer(BigInt::from(n as i64 - 2));
                return Ok(Covolume { value: (n as f64 - 2.0) * PI, pi_multiple: Some(m) });
            }
            let angles = polygon_angles(vs)?;
            let sum: f64 = angles.iter().sum();
            let bound = (n as f64 - 2.0) * PI;
            if sum >= bound - 1e-12 {
                return Err(LabError::NotHyperbolic { angle_sum: sum, bound });
            }
            Ok(Covolume { value: bound - sum, pi_multiple: None })
        }
        DomainSpec::PolygonAngles(angles) => {
            let n = angles.len();
            if n < 3 {
                return Err(LabError::pre("a polygon needs at least three vertices"));
            }
            let sum = angles.iter().fold(BigRational::zero(), |acc, a| acc + a);
            let bound = BigRational::from_integer(BigInt::from(n as i64 - 2));
            if sum >= bound {
                return Err(LabError::NotHyperbolic {
                    angle_sum: sum.to_f64().unwrap_or(f64::NAN) * PI,
                    bound: (n as f64 - 2.0) * PI,
                });
            }
            let m = bound - sum;
            Ok(Covolume { value: m.to_f64().unwrap_or(f64::NAN) * PI, pi_multiple: Some(m) })
        }
        DomainSpec::Genus(g) => {
            if *g < 2 {
                return Err(LabError::pre("hyperbolic surfaces have genus at least 2"));
            }
            let m = BigRational::from_integer(BigInt::from(4 * (*g as i64) - 4));
            Ok(Covolume { value: (4.0 * *g as f64 - 4.0) * PI, pi_multiple: Some(m) })
        }
    }
}

/// Interior angles of a convex polygon. At an interior vertex `v` the map
/// `z -> (z - v) / (z - conj v)` sends `v` to the center of the disk, where
/// geodesics through `v` become diameters.
pub fn polygon_angles(vs: &[PolygonVertex]) -> Result<Vec<f64>> {
    let n = vs.len();
    (0..n)
        .map(|i| {
            let v = match vs[i] {
                PolygonVertex::Ideal(_) => return Ok(0.0),
                PolygonVertex::Interior(p) => {
                    if p.dim() != 2 {
                        return Err(LabError::DimensionMismatch { expected: 2, found: p.dim() });
                    }
                    p.as_complex()
                }
            };
            let dir = |w: &PolygonVertex| -> Complex<f64> {
                match w {
                    PolygonVertex::Interior(q) => (q.as_complex() - v) / (q.as_complex() - v.conj()),
                    PolygonVertex::Ideal(BoundaryPoint::Finite(x)) => (x - v) / (x - v.conj()),
                    PolygonVertex::Ideal(BoundaryPoint::Infinity) => Complex::new(1.0, 0.0),
                }
            };
            let a = dir(&vs[(i + n - 1) % n]);
            let b = dir(&vs[(i + 1) % n]);
            Ok((a * b.conj()).arg().abs())
        })
        .collect()
}

/// `int_{-1/2}^{1/2} int_{sqrt(1-x^2)}^inf dy / y^2 dx` by nested adaptive
/// Simpson. The inner integral is taken over `s = h / y in (0, 1]`, where the
/// integrand is the constant `1 / h`.
pub fn standard_domain_area(tol: f64) -> f64 {
    let inner = |x: f64| {
        let h = (1.0 - x * x).sqrt();
        adaptive_simpson(&|_s: f64| 1.0 / h, 0.0, 1.0, tol, 20)
    };
    adaptive_simpson(&inner, -0.5, 0.5, tol, 40)
}

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1)
}

/// Vertices of the regular hyperbolic `n`-gon with interior angle `alpha`,
/// centered at `i`.
pub fn regular_polygon(n: usize, alpha: f64) -> Result<Vec<PolygonVertex>> {
    let c = (PI / n as f64).cos() / (PI / n as f64).sin() / (alpha / 2.0).tan();
    if !(c > 1.0) {
        return Err(LabError::NotHyperbolic { angle_sum: n as f64 * alpha, bound: (n as f64 - 2.0) * PI });
    }
    let rho = (c.acosh() / 2.0).tanh();
    (0..n)
        .map(|k| {
            let w = Complex::from_polar(rho, std::f64::consts::TAU * k as f64 / n as f64);
            let z = Complex::new(0.0, 1.0) * (1.0 + w) / (1.0 - w);
            Ok(PolygonVertex::Interior(HPoint::plane(z.re, z.im)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn standard_domain_is_pi_over_three() {
        let v = covolume_h2(&DomainSpec::Sl2zStandard).unwrap().value;
        assert!((v - PI / 3.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn ideal_triangle_is_pi() {
        let tri = vec![
            PolygonVertex::Ideal(BoundaryPoint::Finite(Complex::new(-1.0, 0.0))),
            PolygonVertex::Ideal(BoundaryPoint::Finite(Complex::new(1.0, 0.0))),
            PolygonVertex::Ideal(BoundaryPoint::Infinity),
        ];
        assert_eq!(covolume_h2(&DomainSpec::Polygon(tri)).unwrap().value, PI);
    }

    #[test]
    fn regular_octagon_angles_and_area() {
        let oct = regular_polygon(8, PI / 4.0).unwrap();
        for a in polygon_angles(&oct).unwrap() {
            assert!((a - PI / 4.0).abs() < 1e-9, "{a}");
        }
        let v = covolume_h2(&DomainSpec::Polygon(oct)).unwrap().value;
        assert!((v - 4.0 * PI).abs() < 1e-8);
        let exact = covolume_h2(&DomainSpec::PolygonAngles(vec![rat(1, 4); 8])).unwrap();
        assert_eq!(exact.pi_multiple, Some(rat(4, 1)));
        assert_eq!(exact.pi_multiple, covolume_h2(&DomainSpec::Genus(2)).unwrap().pi_multiple);
    }

    #[test]
    fn euclidean_angle_sums_are_rejected() {
        let square = vec![rat(1, 2); 4];
        assert!(matches!(covolume_h2(&DomainSpec::PolygonAngles(square)), Err(LabError::NotHyperbolic { .. })));
    }
}
