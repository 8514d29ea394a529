use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

use crate::error::{LabError, Result};
use crate::linalg::MatrixElement;

/// `[a, b] = a b a^{-1} b^{-1}`; exact when the inputs are.
pub fn commutator<M: MatrixElement>(a: &M, b: &M) -> Result<M> {
    Ok(a.mul(b).mul(&a.try_inv()?).mul(&b.try_inv()?))
}

/// A list of invertible matrices of one size.
#[derive(Debug, Clone)]
pub struct MatrixSet<M> {
    pub elements: Vec<M>,
}

impl<M: MatrixElement> MatrixSet<M> {
    pub fn new(elements: Vec<M>) -> Result<Self> {
        for e in &elements {
            e.try_inv()?;
        }
        Ok(Self { elements })
    }

    pub fn is_exact(&self) -> bool {
        self.elements.first().is_some_and(|e| e.is_exact())
    }

    /// `max ||s - 1||` over the set.
    pub fn radius(&self) -> f64 {
        self.elements.iter().map(|e| e.dist_to_identity()).fold(0.0, f64::max)
    }
}

/// Per-level cap on the number of distinct ladder elements.
pub const LEVEL_CAP: usize = 100_000;

/// `S^(0) = S`, `S^(n) = {[s, u] : s in S, u in S^(n-1)}` with
/// `m_n = max ||x - 1||` over `S^(n)`.
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorLadder<M> {
    #[serde(skip)]
    pub levels: Vec<Vec<M>>,
    pub m: Vec<f64>,
    /// `m_0`.
    pub epsilon: f64,
    /// Whether `m_n <= eps (8 eps)^n` is asserted: needs `eps < 1/8` and
    /// `||s^{-1}|| ||u^{-1}|| <= 4` at every step, which is what turns
    /// `[a, b] - 1 = (ab - ba) a^{-1} b^{-1}` into `||[a,b] - 1|| <= 8
    /// ||a - 1|| ||b - 1||`.
    pub bound_asserted: bool,
    pub bound: Vec<f64>,
    /// Levels where the asserted bound fails (empty when not asserted).
    pub violations: Vec<usize>,
}

fn next_level<M: MatrixElement>(s: &[M], prev: &[M]) -> Result<Vec<M>> {
    let products: Vec<M> =
        s.par_iter().flat_map_iter(|a| prev.iter().map(move |u| commutator(a, u))).collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in products {
        if seen.insert(p.key()) {
            out.push(p);
            if out.len() > LEVEL_CAP {
                return Err(LabError::CapExceeded { cap: LEVEL_CAP });
            }
        }
    }
    Ok(out)
}

fn inv_norm<M: MatrixElement>(x: &M) -> Result<f64> {
    Ok(x.try_inv()?.norm())
}

pub fn commutator_ladder<M: MatrixElement>(s: &MatrixSet<M>, levels: usize) -> Result<CommutatorLadder<M>> {
    commutator_ladder_with(s, levels, |x| inv_norm(x))
}

/// Ladder with a caller-supplied bound on `||x^{-1}||` (used to decide the
/// regime of the contraction bound).
pub fn commutator_ladder_with<M: MatrixElement>(
    s: &MatrixSet<M>,
    levels: usize,
    inverse_norm: impl Fn(&M) -> Result<f64>,
) -> Result<CommutatorLadder<M>> {
    if levels < 1 {
        return Err(LabError::pre("ladder needs at least one level"));
    }
    if s.elements.is_empty() {
        return Err(LabError::Empty("matrix set".into()));
    }
    let mut lv = vec![s.elements.clone()];
    for _ in 0..levels {
        let next = next_level(&s.elements, lv.last().expect("nonempty"))?;
        lv.push(next);
    }
    let m: Vec<f64> = lv.iter().map(|l| l.iter().map(|x| x.dist_to_identity()).fold(0.0, f64::max)).collect();
    let eps = m[0];
    let s_inv = s.elements.iter().map(&inverse_norm).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let mut regime = eps < 0.125;
    for l in &lv[..levels] {
        let u_inv = l.iter().map(&inverse_norm).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        regime &= s_inv * u_inv <= 4.0;
    }
    let bound: Vec<f64> = (0..=levels).map(|n| eps * (8.0 * eps).powi(n as i32)).collect();
    let violations =
        if regime { (0..=levels).filter(|&n| m[n] > bound[n] * (1.0 + 1e-12) + 1e-15).collect() } else { Vec::new() };
    Ok(CommutatorLadder { levels: lv, m, epsilon: eps, bound_asserted: regime, bound, violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NilpotencyVerdict {
    /// Least `N` with `S^(N) = {1}`.
    Class(usize),
    ExceedsCutoff(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct NilpotencyReport {
    pub verdict: NilpotencyVerdict,
    /// Exact arithmetic was used; otherwise identity tests are at `tol`.
    pub exact: bool,
    pub level_sizes: Vec<usize>,
}

pub fn nilpotency_class<M: MatrixElement>(s: &MatrixSet<M>, cutoff: usize, tol: f64) -> Result<NilpotencyReport> {
    if s.elements.is_empty() {
        return Err(LabError::Empty("matrix set".into()));
    }
    let trivial = |l: &[M]| l.iter().all(|x| x.is_identity_within(tol));
    let mut level = s.elements.clone();
    let mut sizes = vec![level.len()];
    for n in 0..=cutoff {
        if trivial(&level) {
            return Ok(NilpotencyReport {
                verdict: NilpotencyVerdict::Class(n),
                exact: s.is_exact(),
                level_sizes: sizes,
            });
        }
        if n == cutoff {
            break;
        }
        level = next_level(&s.elements, &level)?;
        sizes.push(level.len());
    }
    Ok(NilpotencyReport { verdict: NilpotencyVerdict::ExceedsCutoff(cutoff), exact: s.is_exact(), level_sizes: sizes })
}
