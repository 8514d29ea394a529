use nalgebra::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::group::{format_word, FinitelyGeneratedGroup, Isometry, WORD_BALL_CAP};
use crate::error::{LabError, Result};
use crate::hyp_geom::{classify, same_axis, BoundaryPoint, HPoint, IsometryClass, MoebiusClass, MoebiusIsometry};
use crate::sampling::halton;

/// Half the shortest nontrivial displacement at `x` over a word ball.
#[derive(Debug, Clone, Serialize)]
pub struct InjectivityRadius {
    pub value: f64,
    pub minimizer: String,
    /// The minimizing word is strictly shorter than the ball radius, so
    /// longer words are unlikely to do better (heuristic).
    pub stabilized: bool,
    pub word_ball_radius: usize,
}

pub fn injectivity_radius<G: Isometry>(
    group: &FinitelyGeneratedGroup<G>,
    x: &G::Point,
    radius: usize,
) -> Result<InjectivityRadius> {
    if radius < 1 {
        return Err(LabError::pre("word-ball radius must be at least 1"));
    }
    let ball = group.word_ball(radius, WORD_BALL_CAP)?;
    let best = ball
        .nontrivial()
        .map(|e| (e.element.displacement(x), e))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.word.len().cmp(&b.1.word.len())))
        .ok_or_else(|| LabError::Empty("no nontrivial elements in the word ball".into()))?;
    Ok(InjectivityRadius {
        value: 0.5 * best.0,
        minimizer: format_word(&best.1.word),
        stabilized: best.1.word.len() < radius,
        word_ball_radius: radius,
    })
}

/// Where thick-thin samples are drawn from.
#[derive(Debug, Clone, Serialize)]
pub enum SampleRegion {
    /// `[x0, x1] x [y0, y1]` in the upper half-plane, heights spread
    /// log-uniformly.
    Box { x: (f64, f64), y: (f64, f64) },
    /// Hyperbolic disk, area-uniform.
    Disk { center: (f64, f64), radius: f64 },
}

impl SampleRegion {
    /// `n` quasi-random points (Halton) in the region.
    pub fn samples(&self, n: usize) -> Result<Vec<HPoint>> {
        let pts = halton(n, 2);
        match *self {
            SampleRegion::Box { x, y } => {
                if !(y.0 > 0.0 && y.1 >= y.0 && x.1 >= x.0) {
                    return Err(LabError::pre("sample box must satisfy x0 <= x1 and 0 < y0 <= y1"));
                }
                let (l0, l1) = (y.0.ln(), y.1.ln());
                pts.iter().map(|p| HPoint::plane(x.0 + (x.1 - x.0) * p[0], (l0 + (l1 - l0) * p[1]).exp())).collect()
            }
            SampleRegion::Disk { center, radius } => {
                if !(center.1 > 0.0 && radius > 0.0) {
                    return Err(LabError::pre("disk needs a valid center and positive radius"));
                }
                let c = radius.cosh() - 1.0;
                pts.iter()
                    .map(|p| {
                        let r = (1.0 + p[0] * c).acosh();
                        let w = Complex::from_polar((r / 2.0).tanh(), std::f64::consts::TAU * p[1]);
                        let z = Complex::new(0.0, 1.0) * (1.0 + w) / (1.0 - w);
                        HPoint::plane(center.0 + center.1 * z.re, center.1 * z.im)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ThinKind {
    /// Tubular neighborhood of a closed geodesic of length `core_length`.
    Tube {
        core_length: f64,
        axis: (BoundaryPoint, BoundaryPoint),
    },
    Cusp {
        fixed: BoundaryPoint,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ThinComponentReport {
    pub kind: ThinKind,
    pub witness_words: Vec<String>,
    #[serde(skip)]
    pub witnesses: Vec<MoebiusIsometry>,
    pub samples: Vec<HPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThickThinReport {
    pub epsilon: f64,
    pub word_ball_radius: usize,
    pub components: Vec<ThinComponentReport>,
    pub thick_samples: Vec<HPoint>,
    pub thin_sample_count: usize,
    /// Samples that are thin only because of elliptic (torsion) elements;
    /// these belong to cone points, not to tubes or cusps.
    pub orbifold_samples: usize,
}

impl ThickThinReport {
    pub fn cusp_count(&self) -> usize {
        self.components.iter().filter(|c| matches!(c.kind, ThinKind::Cusp { .. })).count()
    }

    pub fn tube_count(&self) -> usize {
        self.components.iter().filter(|c| matches!(c.kind, ThinKind::Tube { .. })).count()
    }
}

const SHARE_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
enum Signature {
    Cusp(BoundaryPoint),
    Tube((BoundaryPoint, BoundaryPoint)),
}

/// Marks samples with `2 InjRad < epsilon` as thin and groups their short
/// witnesses by shared fixed point or shared axis, identifying groups that
/// differ by an element of the ball.
pub fn thick_thin_scan(
    group: &FinitelyGeneratedGroup<MoebiusIsometry>,
    epsilon: f64,
    samples: &[HPoint],
    radius: usize,
) -> Result<ThickThinReport> {
    if !(epsilon > 0.0) {
        return Err(LabError::pre("epsilon must be positive"));
    }
    let ball = group.word_ball(radius, WORD_BALL_CAP)?;
    let elems: Vec<(String, MoebiusIsometry, MoebiusClass)> = ball
        .nontrivial()
        .map(|e| Ok((format_word(&e.word), e.element, classify(&e.element)?)))
        .collect::<Result<_>>()?;

    // Per-sample short witnesses (indices into `elems`), in parallel.
    let per_sample: Vec<Vec<usize>> = samples
        .par_iter()
        .map(|x| {
            elems
                .iter()
                .enumerate()
                .filter(|(_, (_, g, _))| g.act(x).distance_to(x) < epsilon)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut thick = Vec::new();
    let mut thin_count = 0;
    let mut orbifold = 0;
    let mut groups: Vec<(Signature, Vec<usize>, Vec<HPoint>)> = Vec::new();
    for (x, short) in samples.iter().zip(&per_sample) {
        if short.is_empty() {
            thick.push(*x);
            continue;
        }
        thin_count += 1;
        let non_elliptic: Vec<usize> =
            short.iter().copied().filter(|&i| !matches!(elems[i].2, IsometryClass::Elliptic { .. })).collect();
        if non_elliptic.is_empty() {
            orbifold += 1;
            continue;
        }
        let sig = signature(&non_elliptic, &elems).ok_or_else(|| {
            LabError::Unresolved(format!(
                "short elements at ({}, {}) share neither an axis nor a fixed point",
                x.base.re, x.height
            ))
        })?;
        match groups.iter().position(|(s, _, _)| equivalent(s, &sig, &elems)) {
            Some(k) => {
                let g = &mut groups[k];
                for i in non_elliptic {
                    if !g.1.contains(&i) {
                        g.1.push(i);
                    }
                }
                g.2.push(*x);
            }
            None => groups.push((sig, non_elliptic, vec![*x])),
        }
    }

    let components = groups
        .into_iter()
        .map(|(sig, mut wit, pts)| {
            wit.sort_unstable();
            let kind = match sig {
                Signature::Cusp(p) => ThinKind::Cusp { fixed: p },
                Signature::Tube(axis) => {
                    let core = wit
                        .iter()
                        .map(|&i| elems[i].2.translation_length())
                        .filter(|l| *l > 0.0)
                        .fold(f64::INFINITY, f64::min);
                    ThinKind::Tube { core_length: core, axis }
                }
            };
            ThinComponentReport {
                kind,
                witness_words: wit.iter().map(|&i| elems[i].0.clone()).collect(),
                witnesses: wit.iter().map(|&i| elems[i].1).collect(),
                samples: pts,
            }
        })
        .collect();
    Ok(ThickThinReport {
        epsilon,
        word_ball_radius: radius,
        components,
        thick_samples: thick,
        thin_sample_count: thin_count,
        orbifold_samples: orbifold,
    })
}

fn signature(short: &[usize], elems: &[(String, MoebiusIsometry, MoebiusClass)]) -> Option<Signature> {
    let first = match &elems[short[0]].2 {
        IsometryClass::Parabolic { fixed } => Signature::Cusp(*fixed),
        IsometryClass::Hyperbolic { axis, .. } => Signature::Tube(*axis),
        _ => return None,
    };
    let ok = short.iter().all(|&i| match (&first, &elems[i].2) {
        (Signature::Cusp(p), IsometryClass::Parabolic { fixed }) => p.approx_eq(fixed, SHARE_TOL),
        (Signature::Tube(a), IsometryClass::Hyperbolic { axis, .. }) => same_axis(a, axis, SHARE_TOL),
        _ => false,
    });
    ok.then_some(first)
}

/// Same signature, or related by some ball element.
fn equivalent(a: &Signature, b: &Signature, elems: &[(String, MoebiusIsometry, MoebiusClass)]) -> bool {
    let moved = |g: &MoebiusIsometry| match (a, b) {
        (Signature::Cusp(p), Signature::Cusp(q)) => g.act_boundary(*p).approx_eq(q, SHARE_TOL),
        (Signature::Tube(x), Signature::Tube(y)) => {
            same_axis(&(g.act_boundary(x.0), g.act_boundary(x.1)), y, SHARE_TOL)
        }
        _ => false,
    };
    let id = MoebiusIsometry::identity(crate::hyp_geom::Field::Real);
    moved(&id) || elems.iter().any(|(_, g, _)| moved(g))
}
