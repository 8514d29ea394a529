use serde::Serialize;
use std::fmt::Debug;

use crate::error::{LabError, Result};
use crate::hyp_geom::{HPoint, MoebiusIsometry};
use crate::lattice_lab::{FinitelyGeneratedGroup, SampleRegion};
use crate::sampling::halton;

/// A metric space in which nets and nerves are built.
pub trait NetSpace: Sync {
    type Point: Clone + Send + Sync + Debug + Serialize;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Radius of the smallest ball containing the three points, minimized
    /// over lifts lying within `2 r` of `a` in quotient spaces.
    fn triple_radius(&self, a: &Self::Point, b: &Self::Point, c: &Self::Point, r: f64) -> f64;

    /// `n` quasi-random points of the space (or of a region of it).
    fn sample(&self, n: usize) -> Result<Vec<Self::Point>>;

    /// Area of a metric ball of radius `r` (for packing bounds).
    fn ball_area(&self, r: f64) -> f64;
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Smallest enclosing circle of three points of the plane: half the longest
/// side when the triangle is right or obtuse, else the circumradius.
pub fn euclidean_minimax(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let (ab, bc, ca) = (dist2(a, b), dist2(b, c), dist2(c, a));
    let mut s = [ab, bc, ca];
    s.sort_by(f64::total_cmp);
    let [x, y, z] = s;
    if z * z >= x * x + y * y {
        return z / 2.0;
    }
    // R = abc / (4 area)
    let cross = ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
    ab * bc * ca / (2.0 * cross)
}

type Lor = [f64; 3];

fn lorentz(p: &HPoint) -> Lor {
    let (x, y) = (p.base.re, p.height);
    let r2 = x * x + y * y;
    [(1.0 + r2) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y]
}

fn mink(a: Lor, b: Lor) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn hdist(a: Lor, b: Lor) -> f64 {
    (-mink(a, b)).max(1.0).acosh()
}

/// Smallest enclosing ball of three points of H^2, computed on the
/// hyperboloid. Candidates are the three pair midpoints (valid when they
/// enclose the third point) and the circumcenter, the unit timelike vector
/// Minkowski-orthogonal to `a - b` and `a - c`.
pub fn hyperbolic_minimax(a: &HPoint, b: &HPoint, c: &HPoint) -> f64 {
    let (pa, pb, pc) = (lorentz(a), lorentz(b), lorentz(c));
    let mut best = f64::INFINITY;
    for (p, q, o) in [(pa, pb, pc), (pb, pc, pa), (pc, pa, pb)] {
        let s = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
        let n = (-mink(s, s)).sqrt();
        let m = s.map(|v| v / n);
        let rad = hdist(p, q) / 2.0;
        if hdist(m, o) <= rad + 1e-12 {
            best = best.min(rad);
        }
    }
    let u = [pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]];
    let v = [pa[0] - pc[0], pa[1] - pc[1], pa[2] - pc[2]];
    let cr = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let x = [-cr[0], cr[1], cr[2]];
    let q = mink(x, x);
    if q < 0.0 {
        let n = (-q).sqrt();
        let sign = if x[0] < 0.0 { -1.0 } else { 1.0 };
        let x = x.map(|t| sign * t / n);
        best = best.min(hdist(x, pa));
    }
    if best.is_finite() {
        best
    } else {
        hdist(pa, pb).max(hdist(pb, pc)).max(hdist(pc, pa))
    }
}

/// An axis-parallel box of the Euclidean plane.
#[derive(Debug, Clone, Serialize)]
pub struct EuclideanPlane {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl NetSpace for EuclideanPlane {
    type Point = [f64; 2];

    fn distance(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        dist2(*a, *b)
    }
    fn triple_radius(&self, a: &[f64; 2], b: &[f64; 2], c: &[f64; 2], _r: f64) -> f64 {
        euclidean_minimax(*a, *b, *c)
    }
    fn sample(&self, n: usize) -> Result<Vec<[f64; 2]>> {
        Ok(halton(n, 2)
            .into_iter()
            .map(|p| [self.lo[0] + (self.hi[0] - self.lo[0]) * p[0], self.lo[1] + (self.hi[1] - self.lo[1]) * p[1]])
            .collect())
    }
    fn ball_area(&self, r: f64) -> f64 {
        std::f64::consts::PI * r * r
    }
}

/// The unit flat torus `R^2 / Z^2`, points in `[0, 1)^2`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct FlatTorus;

/// Deck translations within two layers of the unit cell.
const SHELL: i32 = 2;

impl FlatTorus {
    fn lifts_near(&self, a: [f64; 2], b: [f64; 2], reach: f64) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for i in -SHELL..=SHELL {
            for j in -SHELL..=SHELL {
                let q = [b[0] + i as f64, b[1] + j as f64];
                if dist2(a, q) < reach {
                    out.push(q);
                }
            }
        }
        out
    }
}

impl NetSpace for FlatTorus {
    type Point = [f64; 2];

    fn distance(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let mut best = f64::INFINITY;
        for i in -SHELL..=SHELL {
            for j in -SHELL..=SHELL {
                best = best.min(dist2(*a, [b[0] + i as f64, b[1] + j as f64]));
            }
        }
        best
    }
    fn triple_radius(&self, a: &[f64; 2], b: &[f64; 2], c: &[f64; 2], r: f64) -> f64 {
        let mut best = f64::INFINITY;
        for bl in self.lifts_near(*a, *b, 2.0 * r) {
            for cl in self.lifts_near(*a, *c, 2.0 * r) {
                best = best.min(euclidean_minimax(*a, bl, cl));
            }
        }
        best
    }
    fn sample(&self, n: usize) -> Result<Vec<[f64; 2]>> {
        Ok(halton(n, 2).into_iter().map(|p| [p[0], p[1]]).collect())
    }
    fn ball_area(&self, r: f64) -> f64 {
        std::f64::consts::PI * r * r
    }
}

/// A region of the hyperbolic plane.
#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicPlane {
    pub region: SampleRegion,
}

impl NetSpace for HyperbolicPlane {
    type Point = HPoint;

    fn distance(&self, a: &HPoint, b: &HPoint) -> f64 {
        a.distance_to(b)
    }
    fn triple_radius(&self, a: &HPoint, b: &HPoint, c: &HPoint, _r: f64) -> f64 {
        hyperbolic_minimax(a, b, c)
    }
    fn sample(&self, n: usize) -> Result<Vec<HPoint>> {
        self.region.samples(n)
    }
    fn ball_area(&self, r: f64) -> f64 {
        std::f64::consts::TAU * (r.cosh() - 1.0)
    }
}

/// A closed hyperbolic surface `Gamma \ H^2`, with points represented in
/// the Dirichlet domain around `center`.
///
/// Distances are minimized over the lifts `gamma` with
/// `d(center, gamma center) <= 2 R + reach` (`R` the domain's
/// circumradius), so they are exact up to `reach`.
#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicSurface {
    pub center: HPoint,
    pub circumradius: f64,
    pub reach: f64,
    /// `(d(center, gamma center), gamma)`, sorted by the first entry.
    #[serde(skip)]
    lifts: Vec<(f64, MoebiusIsometry)>,
    #[serde(skip)]
    neighbors: Vec<MoebiusIsometry>,
}

impl HyperbolicSurface {
    pub fn new(
        group: &FinitelyGeneratedGroup<MoebiusIsometry>,
        center: HPoint,
        circumradius: f64,
        reach: f64,
        word_radius: usize,
    ) -> Result<Self> {
        if !(circumradius > 0.0 && reach > 0.0) {
            return Err(LabError::pre("circumradius and reach must be positive"));
        }
        let ball = group.word_ball(word_radius, crate::lattice_lab::WORD_BALL_CAP)?;
        let mut lifts: Vec<(f64, MoebiusIsometry)> = ball
            .elements()
            .map(|g| (g.act(&center).distance_to(&center), *g))
            .filter(|(d, _)| *d <= 2.0 * circumradius + reach)
            .collect();
        lifts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let neighbors = group.symmetric_generators().map(|(_, g)| *g).collect();
        Ok(Self { center, circumradius, reach, lifts, neighbors })
    }

    pub fn lift_count(&self) -> usize {
        self.lifts.len()
    }

    /// Whether `p` is in the Dirichlet domain (closer to the center than to
    /// its translates by the generators).
    pub fn in_domain(&self, p: &HPoint) -> bool {
        let d0 = p.distance_to(&self.center);
        self.neighbors.iter().all(|g| d0 <= p.distance_to(&g.act(&self.center)) + 1e-12)
    }

    fn lifts_near(&self, a: &HPoint, b: &HPoint, reach: f64) -> Vec<HPoint> {
        let bound = a.distance_to(&self.center) + b.distance_to(&self.center) + reach;
        self.lifts
            .iter()
            .take_while(|(d, _)| *d <= bound)
            .map(|(_, g)| g.act(b))
            .filter(|q| a.distance_to(q) < reach)
            .collect()
    }
}

impl NetSpace for HyperbolicSurface {
    type Point = HPoint;

    fn distance(&self, a: &HPoint, b: &HPoint) -> f64 {
        let (da, db) = (a.distance_to(&self.center), b.distance_to(&self.center));
        let mut best = f64::INFINITY;
        for (d, g) in &self.lifts {
            // d(a, g b) >= d(o, g o) - d(o, a) - d(o, b)
            if d - da - db > best {
                break;
            }
            best = best.min(a.distance_to(&g.act(b)));
        }
        best
    }
    fn triple_radius(&self, a: &HPoint, b: &HPoint, c: &HPoint, r: f64) -> f64 {
        let mut best = f64::INFINITY;
        let bs = self.lifts_near(a, b, 2.0 * r);
        let cs = self.lifts_near(a, c, 2.0 * r);
        for bl in &bs {
            for cl in &cs {
                best = best.min(hyperbolic_minimax(a, bl, cl));
            }
        }
        best
    }
    /// Area-uniform quasi-random points of the circumscribed disk that fall
    /// in the Dirichlet domain; `n` counts the disk samples drawn.
    fn sample(&self, n: usize) -> Result<Vec<HPoint>> {
        let c = self.center;
        let region = SampleRegion::Disk { center: (c.base.re, c.height), radius: self.circumradius };
        Ok(region.samples(n)?.into_iter().filter(|p| self.in_domain(p)).collect())
    }
    fn ball_area(&self, r: f64) -> f64 {
        std::f64::consts::TAU * (r.cosh() - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimax_acute_and_obtuse() {
        // equilateral triangle of side 1: circumradius 1/sqrt 3
        let r = euclidean_minimax([0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]);
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((euclidean_minimax([0.0, 0.0], [2.0, 0.0], [1.0, 0.1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_minimax_matches_collinear_case() {
        let a = HPoint::plane(0.0, 1.0).unwrap();
        let b = HPoint::plane(0.0, 2.0).unwrap();
        let c = HPoint::plane(0.0, 4.0).unwrap();
        assert!((hyperbolic_minimax(&a, &b, &c) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_minimax_is_equidistant_for_symmetric_triangle() {
        use crate::presets::from_disk;
        use nalgebra::Complex;
        let pts: Vec<HPoint> = (0..3)
            .map(|k| from_disk(Complex::from_polar(0.5, std::f64::consts::TAU * k as f64 / 3.0)).unwrap())
            .collect();
        let o = HPoint::plane(0.0, 1.0).unwrap();
        let r = hyperbolic_minimax(&pts[0], &pts[1], &pts[2]);
        assert!((r - o.distance_to(&pts[0])).abs() < 1e-10);
    }

    #[test]
    fn torus_distance_wraps() {
        let t = FlatTorus;
        assert!((t.distance(&[0.05, 0.5], &[0.95, 0.5]) - 0.1).abs() < 1e-12);
    }
}
