//! Hyperboloid model of H^n for arbitrary n, with isometries in SO+(n, 1).

use nalgebra::{DMatrix, DVector};

use super::classify::IsometryClass;
use super::moebius::{Field, MoebiusIsometry};
use super::point::HPoint;
use crate::error::{LabError, Result};
use crate::linalg::null_space;
use crate::optimize::nelder_mead;

/// Minkowski form `-x0 y0 + x1 y1 + ... + xn yn`.
pub fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    -x[0] * y[0] + x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

fn signature(n1: usize) -> DMatrix<f64> {
    let mut q = DMatrix::identity(n1, n1);
    q[(0, 0)] = -1.0;
    q
}

/// Point on the upper sheet `<x, x> = -1`, `x0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint(DVector<f64>);

impl HyperboloidPoint {
    pub fn new(x: DVector<f64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(LabError::InvalidPoint("hyperboloid point needs n + 1 >= 2 coordinates".into()));
        }
        let q = minkowski(&x, &x);
        if (q + 1.0).abs() > 1e-8 * (1.0 + x[0] * x[0]) || !(x[0] > 0.0) {
            return Err(LabError::InvalidPoint(format!("<x, x> = {q}, x0 = {}", x[0])));
        }
        Ok(Self(x))
    }

    /// Lifts tangent coordinates `p` at the origin: `(sqrt(1 + |p|^2), p)`.
    pub fn from_spatial(p: &[f64]) -> Self {
        let s: f64 = p.iter().map(|v| v * v).sum();
        let mut x = DVector::zeros(p.len() + 1);
        x[0] = (1.0 + s).sqrt();
        for (i, v) in p.iter().enumerate() {
            x[i + 1] = *v;
        }
        Self(x)
    }

    pub fn origin(n: usize) -> Self {
        Self::from_spatial(&vec![0.0; n])
    }

    /// The point of the hyperboloid corresponding to `x + iy` in the upper
    /// half-plane.
    pub fn from_half_plane(p: &HPoint) -> Self {
        let (x, y) = (p.base.re, p.height);
        let r2 = x * x + y * y;
        Self(DVector::from_vec(vec![(1.0 + r2) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y]))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn distance_to(&self, other: &Self) -> f64 {
        let c = -minkowski(&self.0, &other.0);
        if c <= 1.0 {
            0.0
        } else {
            c.acosh()
        }
    }
}

/// An element of SO+(n, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzIsometry {
    a: DMatrix<f64>,
}

/// Classification of a Lorentz isometry together with the numerical evidence
/// behind it.
#[derive(Debug, Clone)]
pub struct LorentzClassification {
    pub class: IsometryClass<DVector<f64>, DVector<f64>>,
    /// Smallest displacement found by the grid-started simplex search.
    pub min_displacement_found: f64,
    /// Whether the search minimizer stayed inside the search radius.
    pub minimum_attained: bool,
    /// Parabolic verdicts are numerical, never certified.
    pub certified: bool,
}

/// Spectral radii below `exp(HYPERBOLIC_LOG_GAP)` are treated as
/// non-hyperbolic: a parabolic Jordan block perturbs the unit eigenvalue by
/// about the cube root of machine epsilon.
const HYPERBOLIC_LOG_GAP: f64 = 1e-4;

impl LorentzIsometry {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() < 2 {
            return Err(LabError::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
        }
        let q = signature(a.nrows());
        let defect = (a.transpose() * &q * &a - &q).norm();
        if defect > 1e-8 * (1.0 + a.norm_squared()) {
            return Err(LabError::pre(format!("matrix does not preserve the Minkowski form (defect {defect:e})")));
        }
        if !(a[(0, 0)] > 0.0) {
            return Err(LabError::pre("matrix swaps the sheets of the hyperboloid"));
        }
        Ok(Self { a })
    }

    pub fn identity(n: usize) -> Self {
        Self { a: DMatrix::identity(n + 1, n + 1) }
    }

    /// Boost of rapidity `t` in the (x0, x_axis) plane.
    pub fn boost(n: usize, axis: usize, t: f64) -> Self {
        let mut a = DMatrix::identity(n + 1, n + 1);
        let (c, s) = (t.cosh(), t.sinh());
        a[(0, 0)] = c;
        a[(0, axis)] = s;
        a[(axis, 0)] = s;
        a[(axis, axis)] = c;
        Self { a }
    }

    /// Rotation by `theta` in the spatial (i, j) plane.
    pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut a = DMatrix::identity(n + 1, n + 1);
        let (s, c) = theta.sin_cos();
        a[(i, i)] = c;
        a[(i, j)] = -s;
        a[(j, i)] = s;
        a[(j, j)] = c;
        Self { a }
    }

    /// The SO+(2,1) image of a real Moebius transformation, determined by its
    /// action on three independent hyperboloid points.
    pub fn from_moebius(g: &MoebiusIsometry) -> Result<Self> {
        if g.field() != Field::Real {
            return Err(LabError::DimensionMismatch { expected: 2, found: 3 });
        }
        let pts = [HPoint::plane(0.0, 1.0)?, HPoint::plane(0.0, 2.0)?, HPoint::plane(1.0, 1.0)?];
        let src: Vec<DVector<f64>> = pts.iter().map(|p| HyperboloidPoint::from_half_plane(p).0).collect();
        let dst: Vec<DVector<f64>> = pts.iter().map(|p| HyperboloidPoint::from_half_plane(&g.act(p)).0).collect();
        let s = DMatrix::from_columns(&src);
        let d = DMatrix::from_columns(&dst);
        let inv = s.try_inverse().ok_or(LabError::Singular)?;
        Self::new(d * inv)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.nrows() - 1
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { a: &self.a * &other.a }
    }

    /// `A^{-1} = Q A^T Q`.
    pub fn inverse(&self) -> Self {
        let q = signature(self.a.nrows());
        Self { a: &q * self.a.transpose() * &q }
    }

    pub fn act(&self, p: &HyperboloidPoint) -> HyperboloidPoint {
        HyperboloidPoint(&self.a * &p.0)
    }

    pub fn apply(&self, p: &HyperboloidPoint) -> Result<HyperboloidPoint> {
        if p.0.len() != self.a.nrows() {
            return Err(LabError::DimensionMismatch { expected: self.a.nrows(), found: p.0.len() });
        }
        Ok(self.act(p))
    }

    pub fn displacement_at(&self, p: &HyperboloidPoint) -> f64 {
        self.act(p).distance_to(p)
    }

    /// Minimizes the displacement from every node of a `grid`^n lattice in
    /// `[-radius, radius]^n` (tangent coordinates at the origin).
    pub fn minimize_displacement(&self, grid: usize, radius: f64) -> (Vec<f64>, f64) {
        let n = self.dim();
        let grid = grid.max(1);
        let f = |p: &[f64]| self.displacement_at(&HyperboloidPoint::from_spatial(p));
        let mut best = (vec![0.0; n], f(&vec![0.0; n]));
        let total = grid.pow(n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let start: Vec<f64> = (0..n)
                .map(|_| {
                    let k = rem % grid;
                    rem /= grid;
                    if grid == 1 {
                        0.0
                    } else {
                        -radius + 2.0 * radius * k as f64 / (grid - 1) as f64
                    }
                })
                .collect();
            let (x, v) = nelder_mead(&f, &start, 0.5, 4000, 1e-15);
            if v < best.1 {
                best = (x, v);
            }
        }
        best
    }

    /// Classifies by fixed-vector analysis: a timelike fixed vector means
    /// elliptic, a real eigenvalue off the unit circle means hyperbolic, and
    /// otherwise the fixed lightlike vector gives the parabolic fixed point.
    pub fn classify(&self, grid: usize, tol: f64) -> Result<LorentzClassification> {
        let n1 = self.a.nrows();
        let eye = DMatrix::<f64>::identity(n1, n1);
        let search_radius = 6.0;
        let (argmin, min_disp) = self.minimize_displacement(grid, search_radius);
        // A parabolic search runs off toward its fixed point at infinity.
        let attained = argmin.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e3;

        if (&self.a - &eye).norm() <= tol {
            return Ok(LorentzClassification {
                class: IsometryClass::Identity,
                min_displacement_found: 0.0,
                minimum_attained: true,
                certified: true,
            });
        }

        let eig = self.a.clone().complex_eigenvalues();
        let rho = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let log_rho = rho.ln();
        if log_rho > HYPERBOLIC_LOG_GAP {
            let forward = lightlike_eigenvector(&self.a, rho)?;
            let backward = lightlike_eigenvector(&self.a, 1.0 / rho)?;
            return Ok(LorentzClassification {
                class: IsometryClass::Hyperbolic { translation_length: log_rho, axis: (backward, forward) },
                min_displacement_found: min_disp,
                minimum_attained: attained,
                certified: true,
            });
        }
        if min_disp > 1e-6 && attained && log_rho > 1e-7 {
            return Err(LabError::Borderline {
                gap: log_rho,
                candidates: vec!["Hyperbolic".into(), "Parabolic".into()],
            });
        }

        let fixed = null_space(&(&self.a - &eye), 1e-7);
        if fixed.ncols() == 0 {
            return Err(LabError::Borderline { gap: log_rho, candidates: vec!["Elliptic".into(), "Parabolic".into()] });
        }
        let q = signature(n1);
        let gram = fixed.transpose() * &q * &fixed;
        let se = gram.clone().symmetric_eigen();
        let (imin, lmin) = se
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
            .expect("non-empty null space");
        let w = &fixed * se.eigenvectors.column(imin);
        if lmin < -1e-6 {
            let mut x = w / (-lmin).sqrt();
            if x[0] < 0.0 {
                x = -x;
            }
            return Ok(LorentzClassification {
                class: IsometryClass::Elliptic { fixed: x },
                min_displacement_found: min_disp,
                minimum_attained: true,
                certified: true,
            });
        }
        let mut v = w;
        if v[0] < 0.0 {
            v = -v;
        }
        let v = &v / v[0];
        Ok(LorentzClassification {
            class: IsometryClass::Parabolic { fixed: v },
            min_displacement_found: min_disp,
            minimum_attained: false,
            certified: false,
        })
    }
}

/// Lightlike eigenvector for a simple real eigenvalue, scaled to `x0 = 1`.
fn lightlike_eigenvector(a: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    let n1 = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(n1, n1) * lambda;
    let ns = null_space(&shifted, 1e-8 * lambda.max(1.0) * a.norm());
    if ns.ncols() == 0 {
        return Err(LabError::Borderline { gap: lambda.ln(), candidates: vec!["Hyperbolic".into()] });
    }
    let v = ns.column(0).into_owned();
    Ok(&v / v[0])
}
