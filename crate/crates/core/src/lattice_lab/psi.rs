use rayon::prelude::*;
use serde::Serialize;

use super::group::{format_word, FinitelyGeneratedGroup, WORD_BALL_CAP};
use crate::error::{LabError, Result};
use crate::hyp_geom::{translation_length, HPoint, MoebiusIsometry};

/// Terms with `d_gamma(x) - |gamma|` at or below this are on a min-set.
pub const DOMAIN_TOL: f64 = 1e-12;

/// The profile `f` in `psi(x) = sum f(d_gamma(x) - |gamma|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bump {
    /// `((eps - t)_+)^2 / t`: blows up at 0, strictly decreasing on
    /// `(0, eps]`, zero on `[eps, inf)`, C^1.
    Standard,
    /// Constant 1 on `(0, 0.9 eps]`, then a linear ramp to 0 at `eps`. Not
    /// strictly decreasing; used as a negative control.
    Plateau,
}

impl Bump {
    pub fn eval(self, t: f64, eps: f64) -> f64 {
        if t >= eps {
            return 0.0;
        }
        match self {
            Bump::Standard => (eps - t).powi(2) / t,
            Bump::Plateau => ((eps - t) / (0.1 * eps)).min(1.0),
        }
    }
}

#[derive(Debug, Clone)]
struct Term {
    word: String,
    element: MoebiusIsometry,
    length: f64,
}

/// The short set `{gamma in ball \ 1 : |gamma| <= eps}` with its translation
/// lengths, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct PsiField {
    terms: Vec<Term>,
    pub epsilon: f64,
    pub bump: Bump,
    pub word_ball_radius: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiValue {
    pub value: f64,
    /// Short elements contributing a nonzero term.
    pub active_terms: usize,
    /// Short elements (`|gamma| <= eps`) whose displacement at `x` is
    /// nevertheless `>= eps`: the two readings of the short set differ there.
    pub disagreements: usize,
}

impl PsiField {
    pub fn new(
        group: &FinitelyGeneratedGroup<MoebiusIsometry>,
        epsilon: f64,
        radius: usize,
        bump: Bump,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(LabError::pre("epsilon must be positive"));
        }
        let ball = group.word_ball(radius, WORD_BALL_CAP)?;
        let mut terms = Vec::new();
        for e in ball.nontrivial() {
            let length = translation_length(&e.element)?.value;
            if length <= epsilon {
                terms.push(Term { word: format_word(&e.word), element: e.element, length });
            }
        }
        Ok(Self { terms, epsilon, bump, word_ball_radius: radius })
    }

    pub fn short_words(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|t| t.word.as_str())
    }

    pub fn value(&self, x: &HPoint) -> Result<PsiValue> {
        let mut out = PsiValue { value: 0.0, active_terms: 0, disagreements: 0 };
        for t in &self.terms {
            let d = t.element.apply(x)?.distance_to(x);
            let s = d - t.length;
            if s <= DOMAIN_TOL {
                return Err(LabError::Domain(format!("point lies on the min-set of {}", t.word)));
            }
            let f = self.bump.eval(s, self.epsilon);
            if f > 0.0 {
                out.active_terms += 1;
            }
            if d >= self.epsilon {
                out.disagreements += 1;
            }
            out.value += f;
        }
        Ok(out)
    }

    /// Central differences in the half-plane/space coordinates.
    pub fn gradient(&self, x: &HPoint, h: f64) -> Result<Vec<f64>> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(LabError::pre("finite-difference step must be positive"));
        }
        if x.height <= h {
            return Err(LabError::Domain("finite-difference stencil leaves the upper half-space".into()));
        }
        let coords = x.coords();
        let mut grad = Vec::with_capacity(coords.len());
        for k in 0..coords.len() {
            let mut plus = coords.clone();
            let mut minus = coords.clone();
            plus[k] += h;
            minus[k] -= h;
            let fp = self.value(&point_from(&plus)?)?.value;
            let fm = self.value(&point_from(&minus)?)?.value;
            grad.push((fp - fm) / (2.0 * h));
        }
        Ok(grad)
    }
}

fn point_from(c: &[f64]) -> Result<HPoint> {
    match c.len() {
        2 => HPoint::plane(c[0], c[1]),
        3 => HPoint::space(c[0], c[1], c[2]),
        n => Err(LabError::DimensionMismatch { expected: 2, found: n }),
    }
}

pub fn psi_value(
    group: &FinitelyGeneratedGroup<MoebiusIsometry>,
    x: &HPoint,
    epsilon: f64,
    radius: usize,
) -> Result<PsiValue> {
    PsiField::new(group, epsilon, radius, Bump::Standard)?.value(x)
}

pub fn psi_gradient(
    group: &FinitelyGeneratedGroup<MoebiusIsometry>,
    x: &HPoint,
    epsilon: f64,
    radius: usize,
    h: f64,
) -> Result<Vec<f64>> {
    PsiField::new(group, epsilon, radius, Bump::Standard)?.gradient(x, h)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientViolation {
    pub point: HPoint,
    pub psi: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientLemmaReport {
    pub violations: Vec<GradientViolation>,
    /// Samples with `psi` in `(tol, 2 tol)`, excluded from the verdict.
    pub borderline: usize,
    pub checked: usize,
    pub tol: f64,
    pub grad_tol: f64,
}

/// At every sample, either `psi` and its gradient both vanish or neither
/// does.
pub fn gradient_lemma_check(
    field: &PsiField,
    samples: &[HPoint],
    h: f64,
    tol: f64,
    grad_tol: f64,
) -> Result<GradientLemmaReport> {
    let evals: Vec<(HPoint, f64, f64)> = samples
        .par_iter()
        .map(|x| {
            let psi = field.value(x)?.value;
            let g = field.gradient(x, h)?;
            Ok((*x, psi, g.iter().map(|v| v * v).sum::<f64>().sqrt()))
        })
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut borderline = 0;
    for (point, psi, gn) in evals {
        if psi > tol && psi < 2.0 * tol {
            borderline += 1;
            continue;
        }
        let ok = (psi <= tol && gn <= grad_tol) || (psi > tol && gn > grad_tol);
        if !ok {
            violations.push(GradientViolation { point, psi, gradient_norm: gn });
        }
    }
    Ok(GradientLemmaReport { violations, borderline, checked: samples.len() - borderline, tol, grad_tol })
}
