//! Named example groups.
//!
//! The genus-two surface group is the Bolza group: the regular hyperbolic
//! octagon with interior angles pi/4, centered at `i`, with opposite sides
//! paired by hyperbolic translations through the center. In the disk model
//! the pairing across the sides whose midpoints lie at angle `k pi / 4` is
//! `R_k T R_k^{-1}` with
//!
//! ```text
//! T   = [[1 + sqrt 2, sqrt(2 + 2 sqrt 2)], [sqrt(2 + 2 sqrt 2), 1 + sqrt 2]]
//! R_k = diag(e^{i k pi / 8}, e^{-i k pi / 8})
//! ```
//!
//! `T` translates by twice the inradius `r`, `cosh r = 1 + sqrt 2`, and the
//! matrices are moved to the upper half-plane with the Cayley transform
//! `[[1, -i], [1, i]]`. The translation length `2r ~ 3.057` is the systole.
//! The octagon's vertices lie at angles `(2k + 1) pi / 8`, at hyperbolic
//! distance `R` from the center with `cosh R = (1 + sqrt 2)^2`, so the eight
//! angles sum to `2 pi` as the side pairing requires.

use nalgebra::{Complex, DMatrix, DVector};
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::euc_geom::EuclideanIsometry;
use crate::hyp_geom::{HPoint, MoebiusIsometry};
use crate::lattice_lab::{FinitelyGeneratedGroup, SampleRegion};

type C64 = Complex<f64>;

pub fn sl2z_s() -> MoebiusIsometry {
    MoebiusIsometry::real(0.0, -1.0, 1.0, 0.0).expect("det 1")
}

pub fn sl2z_t() -> MoebiusIsometry {
    MoebiusIsometry::translation(1.0)
}

/// `SL_2(Z)` generated by `S: z -> -1/z` and `T: z -> z + 1`.
pub fn sl2z() -> FinitelyGeneratedGroup<MoebiusIsometry> {
    FinitelyGeneratedGroup::new(vec![sl2z_s(), sl2z_t()], true, Some("sl2z".into())).expect("nonempty")
}

/// The cusp stabilizer `<z -> z + 1>`.
pub fn cusp_model() -> FinitelyGeneratedGroup<MoebiusIsometry> {
    FinitelyGeneratedGroup::new(vec![sl2z_t()], true, Some("cusp-model".into())).expect("nonempty")
}

/// `<z -> e^ell z>`: a single closed geodesic of length `ell`.
pub fn cyclic_hyperbolic(ell: f64) -> Result<FinitelyGeneratedGroup<MoebiusIsometry>> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(LabError::pre("translation length must be positive"));
    }
    let g = MoebiusIsometry::real((ell / 2.0).exp(), 0.0, 0.0, (-ell / 2.0).exp())?;
    FinitelyGeneratedGroup::new(vec![g], false, Some(format!("cyclic-hyperbolic({ell})")))
}

/// Inradius of the Bolza octagon: `cosh r = 1 + sqrt 2`.
pub fn octagon_inradius() -> f64 {
    (1.0 + 2f64.sqrt()).acosh()
}

/// Circumradius of the Bolza octagon: `cosh R = (1 + sqrt 2)^2`.
pub fn octagon_circumradius() -> f64 {
    (1.0 + 2f64.sqrt()).powi(2).acosh()
}

pub fn octagon_center() -> HPoint {
    HPoint::plane(0.0, 1.0).expect("valid")
}

/// Disk-model point `w` moved to the upper half-plane.
pub fn from_disk(w: C64) -> Result<HPoint> {
    let z = C64::new(0.0, 1.0) * (1.0 + w) / (1.0 - w);
    HPoint::plane(z.re, z.im)
}

/// Vertices of the Bolza octagon in the upper half-plane.
pub fn octagon_vertices() -> Vec<HPoint> {
    let rho = (octagon_circumradius() / 2.0).tanh();
    (0..8).map(|k| from_disk(C64::from_polar(rho, (2 * k + 1) as f64 * PI / 8.0)).expect("inside the disk")).collect()
}

fn su11_to_sl2r(a: [C64; 4]) -> Result<MoebiusIsometry> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    // M = C^{-1} A C with C = [[1, -i], [1, i]], C^{-1} = (1 / 2i) [[i, i], [-1, 1]]
    let c = [one, -i, one, i];
    let cinv = [i, i, -one, one].map(|z| z / (2.0 * i));
    let mul = |x: [C64; 4], y: [C64; 4]| {
        [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
    };
    let m = mul(mul(cinv, a), c);
    if m.iter().any(|z| z.im.abs() > 1e-9) {
        return Err(LabError::pre("Cayley transform did not produce a real matrix"));
    }
    MoebiusIsometry::real(m[0].re, m[1].re, m[2].re, m[3].re)
}

/// The four side pairings `g_0, ..., g_3` of the Bolza octagon.
pub fn octagon_generators() -> Vec<MoebiusIsometry> {
    let alpha = 1.0 + 2f64.sqrt();
    let beta = (2.0 + 2.0 * 2f64.sqrt()).sqrt();
    (0..4)
        .map(|k| {
            let e = C64::from_polar(1.0, k as f64 * PI / 4.0);
            let a = [C64::new(alpha, 0.0), beta * e, beta * e.conj(), C64::new(alpha, 0.0)];
            su11_to_sl2r(a).expect("SU(1,1) element")
        })
        .collect()
}

/// Fundamental group of the genus-two Bolza surface.
pub fn octagon_genus2() -> FinitelyGeneratedGroup<MoebiusIsometry> {
    FinitelyGeneratedGroup::new(octagon_generators(), false, Some("octagon-genus2".into())).expect("nonempty")
}

/// Translations by `e_1`, `e_2` of the plane.
pub fn z2() -> FinitelyGeneratedGroup<EuclideanIsometry> {
    FinitelyGeneratedGroup::new(
        vec![EuclideanIsometry::translation(&[1.0, 0.0]), EuclideanIsometry::translation(&[0.0, 1.0])],
        true,
        Some("z2".into()),
    )
    .expect("nonempty")
}

/// The wallpaper group p2: `Z^2` and the half-turn about the origin.
pub fn p2_generators() -> Vec<EuclideanIsometry> {
    let half_turn = EuclideanIsometry::new(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]), DVector::zeros(2))
        .expect("orthogonal");
    vec![EuclideanIsometry::translation(&[1.0, 0.0]), EuclideanIsometry::translation(&[0.0, 1.0]), half_turn]
}

pub fn p2() -> FinitelyGeneratedGroup<EuclideanIsometry> {
    FinitelyGeneratedGroup::new(p2_generators(), true, Some("p2".into())).expect("nonempty")
}

/// A preset resolved by name.
#[derive(Debug, Clone)]
pub enum Preset {
    Hyperbolic(FinitelyGeneratedGroup<MoebiusIsometry>),
    Euclidean(FinitelyGeneratedGroup<EuclideanIsometry>),
    /// A single element (for classification).
    Element(MoebiusIsometry),
}

pub const PRESET_NAMES: &[&str] =
    &["sl2z", "sl2z-S", "sl2z-T", "cusp-model", "cyclic-hyperbolic(<ell>)", "octagon-genus2", "z2", "p2"];

pub fn by_name(name: &str) -> Result<Preset> {
    let name = name.trim();
    if let Some(arg) = name.strip_prefix("cyclic-hyperbolic(").and_then(|s| s.strip_suffix(')')) {
        let ell: f64 = arg.trim().parse().map_err(|_| LabError::pre(format!("bad translation length '{arg}'")))?;
        return Ok(Preset::Hyperbolic(cyclic_hyperbolic(ell)?));
    }
    Ok(match name {
        "sl2z" => Preset::Hyperbolic(sl2z()),
        "sl2z-S" => Preset::Element(sl2z_s()),
        "sl2z-T" => Preset::Element(sl2z_t()),
        "cusp-model" => Preset::Hyperbolic(cusp_model()),
        "octagon-genus2" => Preset::Hyperbolic(octagon_genus2()),
        "z2" => Preset::Euclidean(z2()),
        "p2" => Preset::Euclidean(p2()),
        other => return Err(LabError::pre(format!("unknown preset '{other}'; known: {}", PRESET_NAMES.join(", ")))),
    })
}

/// Default thick-thin sampling region for a hyperbolic preset.
pub fn default_region(name: &str) -> SampleRegion {
    if name.starts_with("cyclic-hyperbolic") {
        SampleRegion::Disk { center: (0.0, 1.0), radius: 3.0 }
    } else if name == "octagon-genus2" {
        SampleRegion::Disk { center: (0.0, 1.0), radius: octagon_circumradius() }
    } else {
        SampleRegion::Box { x: (-0.5, 0.5), y: (0.5, 20.0) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_geom::{classify, IsometryClass};

    #[test]
    fn octagon_pairings_are_hyperbolic_with_systole_length() {
        let sys = 2.0 * octagon_inradius();
        for g in octagon_generators() {
            match classify(&g).unwrap() {
                IsometryClass::Hyperbolic { translation_length, .. } => {
                    assert!((translation_length - sys).abs() < 1e-9)
                }
                c => panic!("{c:?}"),
            }
            // translates the center along a diameter
            assert!((g.act(&octagon_center()).distance_to(&octagon_center()) - sys).abs() < 1e-9);
        }
    }

    #[test]
    fn pairings_map_sides_to_opposite_sides() {
        let v = octagon_vertices();
        for (k, g) in octagon_generators().iter().enumerate() {
            // side between vertices k+3, k+4 (midpoint angle pi + k pi/4) maps to
            // the side between k-1, k (midpoint angle k pi / 4)
            let a = g.act(&v[(k + 3) % 8]);
            let b = g.act(&v[(k + 4) % 8]);
            let targets = [v[(k + 7) % 8], v[k % 8]];
            for p in [a, b] {
                assert!(targets.iter().any(|t| t.distance_to(&p) < 1e-8), "generator {k}");
            }
        }
    }

    #[test]
    fn vertex_angle_sum_is_two_pi() {
        use crate::lattice_lab::{polygon_angles, PolygonVertex};
        let vs: Vec<PolygonVertex> = octagon_vertices().into_iter().map(PolygonVertex::Interior).collect();
        let sum: f64 = polygon_angles(&vs).unwrap().iter().sum();
        assert!((sum - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn names_resolve() {
        assert!(matches!(by_name("cyclic-hyperbolic(0.05)").unwrap(), Preset::Hyperbolic(_)));
        assert!(matches!(by_name("p2").unwrap(), Preset::Euclidean(_)));
        assert!(by_name("nope").is_err());
    }
}
