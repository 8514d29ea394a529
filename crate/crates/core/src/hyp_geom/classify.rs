use nalgebra::Complex;
use serde::Serialize;

use super::moebius::{Field, MoebiusIsometry};
use super::point::{geodesic_apex, BoundaryPoint, HPoint};
use crate::error::{LabError, Result};

type C64 = Complex<f64>;

/// `|(|tr| - 2)|` at or below this is treated as exactly parabolic; it only
/// absorbs roundoff from exact integer or conjugated inputs.
pub const PARABOLIC_TOL: f64 = 1e-12;
/// `|(|tr| - 2)|` in `(PARABOLIC_TOL, BORDERLINE_BAND)` is undecidable.
pub const BORDERLINE_BAND: f64 = 1e-7;
const IDENTITY_TOL: f64 = 1e-10;

/// The isometry trichotomy plus the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum IsometryClass<P, B> {
    Identity,
    Elliptic { fixed: P },
    Parabolic { fixed: B },
    Hyperbolic { translation_length: f64, axis: (B, B) },
}

impl<P, B> IsometryClass<P, B> {
    pub fn name(&self) -> &'static str {
        match self {
            IsometryClass::Identity => "Identity",
            IsometryClass::Elliptic { .. } => "Elliptic",
            IsometryClass::Parabolic { .. } => "Parabolic",
            IsometryClass::Hyperbolic { .. } => "Hyperbolic",
        }
    }

    pub fn translation_length(&self) -> f64 {
        match self {
            IsometryClass::Hyperbolic { translation_length, .. } => *translation_length,
            _ => 0.0,
        }
    }
}

pub type MoebiusClass = IsometryClass<HPoint, BoundaryPoint>;

/// Displacement `d(g p, p)`.
pub fn displacement(g: &MoebiusIsometry, p: &HPoint) -> Result<f64> {
    let q = g.apply(p)?;
    Ok(q.distance_to(p))
}

/// Boundary fixed points of `z -> (a z + b) / (c z + d)`: roots of
/// `c z^2 + (d - a) z - b = 0`, using the discriminant `(a - d)^2 + 4 b c`.
fn boundary_fixed_points(g: &MoebiusIsometry) -> (BoundaryPoint, BoundaryPoint, C64) {
    let [a, b, c, d] = g.entries();
    let disc = (a - d) * (a - d) + b * c * 4.0;
    let root = disc.sqrt();
    if c.norm() <= 1e-14 {
        // One fixed point at infinity; the other solves (d - a) z = b.
        let other = BoundaryPoint::from_root(b, d - a);
        return (BoundaryPoint::Infinity, other, disc);
    }
    let two_c = c * 2.0;
    let p = BoundaryPoint::Finite((a - d + root) / two_c);
    let q = BoundaryPoint::Finite((a - d - root) / two_c);
    (p, q, disc)
}

/// Classifies a Moebius isometry by its fixed points, cross-checked against
/// the trace.
///
/// Matrices whose trace lies in the borderline band around `|tr| = 2` are
/// reported as [`LabError::Borderline`] with both candidate classes.
pub fn classify(g: &MoebiusIsometry) -> Result<MoebiusClass> {
    if g.is_identity(IDENTITY_TOL) {
        return Ok(IsometryClass::Identity);
    }
    let dim = if g.field() == Field::Complex { 3 } else { 2 };
    let tr = g.trace();
    let (p, q, disc) = boundary_fixed_points(g);

    // Trace route: tr^2 - 4 vanishes exactly for parabolics.
    let u = tr * tr - C64::new(4.0, 0.0);
    let gap = match g.field() {
        Field::Real => tr.re.abs() - 2.0,
        Field::Complex => u.norm(),
    };
    let near_parabolic = match g.field() {
        Field::Real => gap.abs(),
        Field::Complex => gap,
    };
    if near_parabolic <= PARABOLIC_TOL {
        let fixed = if p.approx_eq(&q, 1e-6) { p } else { pick_finite_or_inf(p, q) };
        return Ok(IsometryClass::Parabolic { fixed });
    }
    if near_parabolic < BORDERLINE_BAND {
        let other = if g.field() == Field::Real && gap < 0.0 { "Elliptic" } else { "Hyperbolic" };
        return Err(LabError::Borderline { gap, candidates: vec!["Parabolic".into(), other.into()] });
    }

    let elliptic_by_trace = tr.im.abs() <= PARABOLIC_TOL && tr.re.abs() < 2.0;
    if g.field() == Field::Complex && tr.re.abs() < 2.0 && tr.im.abs() > PARABOLIC_TOL && tr.im.abs() < BORDERLINE_BAND
    {
        return Err(LabError::Borderline {
            gap: tr.im.abs(),
            candidates: vec!["Elliptic".into(), "Hyperbolic".into()],
        });
    }

    // Fixed-point route. In the real case an elliptic has complex-conjugate
    // roots, one in the upper half-plane.
    if g.field() == Field::Real {
        let elliptic_by_roots = disc.re < 0.0;
        if elliptic_by_roots != elliptic_by_trace {
            return Err(LabError::Borderline { gap, candidates: vec!["Elliptic".into(), "Hyperbolic".into()] });
        }
        if elliptic_by_roots {
            let [a, _, c, d] = g.entries();
            let z = (a - d + C64::new(0.0, (-disc.re).sqrt())) / (c * 2.0);
            let z = if z.im < 0.0 { z.conj() } else { z };
            return Ok(IsometryClass::Elliptic { fixed: HPoint::raw(C64::new(z.re, 0.0), z.im, 2) });
        }
        let ell = 2.0 * (tr.re.abs() / 2.0).acosh();
        return Ok(IsometryClass::Hyperbolic { translation_length: ell, axis: order_axis(p, q) });
    }

    if elliptic_by_trace {
        // Fixes the geodesic joining its two boundary fixed points pointwise.
        return Ok(IsometryClass::Elliptic { fixed: geodesic_apex(p, q, dim) });
    }
    let ac = (tr / 2.0).acosh();
    let ell = 2.0 * ac.re.abs();
    Ok(IsometryClass::Hyperbolic { translation_length: ell, axis: order_axis(p, q) })
}

fn pick_finite_or_inf(p: BoundaryPoint, q: BoundaryPoint) -> BoundaryPoint {
    match (p, q) {
        (BoundaryPoint::Infinity, _) | (_, BoundaryPoint::Infinity) => BoundaryPoint::Infinity,
        (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => BoundaryPoint::Finite((a + b) * 0.5),
    }
}

/// Orders axis endpoints deterministically (infinity last, then by real part).
fn order_axis(p: BoundaryPoint, q: BoundaryPoint) -> (BoundaryPoint, BoundaryPoint) {
    match (p, q) {
        (BoundaryPoint::Infinity, other) => (other, BoundaryPoint::Infinity),
        (other, BoundaryPoint::Infinity) => (other, BoundaryPoint::Infinity),
        (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
            if (a.re, a.im) <= (b.re, b.im) {
                (p, q)
            } else {
                (q, p)
            }
        }
    }
}

/// Whether two axes coincide as unordered pairs of boundary points.
pub fn same_axis(a: &(BoundaryPoint, BoundaryPoint), b: &(BoundaryPoint, BoundaryPoint), tol: f64) -> bool {
    (a.0.approx_eq(&b.0, tol) && a.1.approx_eq(&b.1, tol)) || (a.0.approx_eq(&b.1, tol) && a.1.approx_eq(&b.0, tol))
}

/// `|g|` together with whether the infimum of the displacement is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslationLength {
    pub value: f64,
    pub attained: bool,
}

pub fn translation_length(g: &MoebiusIsometry) -> Result<TranslationLength> {
    Ok(match classify(g)? {
        IsometryClass::Parabolic { .. } => TranslationLength { value: 0.0, attained: false },
        c => TranslationLength { value: c.translation_length(), attained: true },
    })
}

/// A point on the axis of a hyperbolic element.
pub fn axis_point(axis: &(BoundaryPoint, BoundaryPoint), dim: usize) -> HPoint {
    geodesic_apex(axis.0, axis.1, dim)
}

/// `h g h^{-1}`.
pub fn conjugate(g: &MoebiusIsometry, h: &MoebiusIsometry) -> MoebiusIsometry {
    g.conjugate_by(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unipotent_is_parabolic_at_infinity() {
        let t = MoebiusIsometry::translation(1.0);
        assert_eq!(classify(&t).unwrap(), IsometryClass::Parabolic { fixed: BoundaryPoint::Infinity });
    }

    #[test]
    fn diagonal_is_hyperbolic_on_imaginary_axis() {
        let g = MoebiusIsometry::real(2.0, 0.0, 0.0, 0.5).unwrap();
        match classify(&g).unwrap() {
            IsometryClass::Hyperbolic { translation_length, axis } => {
                assert!((translation_length - 2.0 * 2f64.ln()).abs() < 1e-9);
                assert!(axis.0.approx_eq(&BoundaryPoint::Finite(C64::new(0.0, 0.0)), 1e-12));
                assert_eq!(axis.1, BoundaryPoint::Infinity);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn rotation_fixes_i() {
        let g = MoebiusIsometry::rotation_about_i(std::f64::consts::PI / 8.0);
        match classify(&g).unwrap() {
            IsometryClass::Elliptic { fixed } => {
                assert!(fixed.distance_to(&HPoint::plane(0.0, 1.0).unwrap()) < 1e-9);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn borderline_trace_is_an_error_with_both_candidates() {
        // a + 1/a = 2 + 1e-9
        let a = 1.0 + 1e-9 / 2.0 + (1e-9f64 + 1e-18 / 4.0).sqrt();
        let g = MoebiusIsometry::real(a, 1.0, 0.0, 1.0 / a).unwrap();
        match classify(&g) {
            Err(LabError::Borderline { candidates, .. }) => {
                assert!(candidates.contains(&"Parabolic".to_string()));
                assert!(candidates.contains(&"Hyperbolic".to_string()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn translation_length_flags_unattained_infimum() {
        let t = translation_length(&MoebiusIsometry::translation(1.0)).unwrap();
        assert_eq!(t, TranslationLength { value: 0.0, attained: false });
        let h = translation_length(&MoebiusIsometry::real(3.0, 0.0, 0.0, 1.0 / 3.0).unwrap()).unwrap();
        assert!((h.value - 2.0 * 3f64.ln()).abs() < 1e-9 && h.attained);
    }

    #[test]
    fn loxodromic_in_h3() {
        let lam = C64::from_polar(2.0, 0.4);
        let g = MoebiusIsometry::complex(lam, C64::new(0.0, 0.0), C64::new(0.0, 0.0), lam.inv()).unwrap();
        match classify(&g).unwrap() {
            IsometryClass::Hyperbolic { translation_length, .. } => {
                assert!((translation_length - 2.0 * 2f64.ln()).abs() < 1e-9);
            }
            c => panic!("{c:?}"),
        }
        let p = HPoint::space(0.0, 0.0, 1.0).unwrap();
        // On the axis the displacement is the complex length's real part.
        assert!((displacement(&g, &p).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn elliptic_in_h3_fixes_its_axis() {
        let lam = C64::from_polar(1.0, 0.7);
        let h =
            MoebiusIsometry::complex(C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(0.1, 0.0), C64::new(1.0, 0.0))
                .unwrap();
        let g =
            MoebiusIsometry::complex(lam, C64::new(0.0, 0.0), C64::new(0.0, 0.0), lam.inv()).unwrap().conjugate_by(&h);
        match classify(&g).unwrap() {
            IsometryClass::Elliptic { fixed } => assert!(displacement(&g, &fixed).unwrap() < 1e-7),
            c => panic!("{c:?}"),
        }
    }
}
