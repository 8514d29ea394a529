use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{LabError, Result};

/// Nonempty words of length at most 3 over `2g` letters (generators and
/// inverses, not necessarily reduced): `2g + (2g)^2 + (2g)^3`.
pub fn word_count(g: u64) -> BigUint {
    let a = BigUint::from(2 * g);
    &a + &a * &a + &a * &a * &a
}

/// Multisets of size `k` drawn from `w` kinds: `C(w + k - 1, k)`, with the
/// empty multiset counted once even when `w = 0`.
fn multisets(w: &BigUint, k: u64) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    if w.is_zero() {
        return BigUint::zero();
    }
    binomial(w + BigUint::from(k) - 1u32, BigUint::from(k))
}

/// `ceil(c v)`.
pub fn size_bound(c: f64, v: u64) -> Result<u64> {
    if !(c > 0.0 && c.is_finite()) || v < 1 {
        return Err(LabError::pre("need c > 0 and v >= 1"));
    }
    Ok((c * v as f64 - 1e-12).ceil() as u64)
}

/// Presentations with `g <= ceil(c v)` generators and a multiset of
/// `k <= ceil(c v)` relators, each a nonempty word of length at most 3:
/// `N = sum_g sum_k C(W_g + k - 1, k)`.
pub fn count_presentations(c: f64, v: u64) -> Result<BigUint> {
    let n = size_bound(c, v)?;
    let mut total = BigUint::zero();
    for g in 0..=n {
        let w = word_count(g);
        for k in 0..=n {
            total += multisets(&w, k);
        }
    }
    Ok(total)
}

/// Natural logarithm of a big integer.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub v: u64,
    /// Decimal digits of `N(c, v)`.
    pub digits: usize,
    /// `log N / (v log v)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub c: f64,
    pub rows: Vec<GrowthRow>,
    pub monotone: bool,
    /// Largest relative change between consecutive ratios.
    pub max_step_drift: f64,
    /// Relative change from the first ratio to the last.
    pub total_drift: f64,
}

impl GrowthProfile {
    /// All ratios lie in `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.rows.iter().all(|r| r.ratio >= lo && r.ratio <= hi)
    }
}

pub fn growth_profile(c: f64, vs: &[u64]) -> Result<GrowthProfile> {
    let mut rows = Vec::with_capacity(vs.len());
    for &v in vs {
        if v < 2 {
            return Err(LabError::pre("growth ratios need v >= 2 (log v > 0)"));
        }
        let n = count_presentations(c, v)?;
        let vf = v as f64;
        rows.push(GrowthRow { v, digits: n.to_string().len(), ratio: ln_big(&n) / (vf * vf.ln()) });
    }
    let r: Vec<f64> = rows.iter().map(|x| x.ratio).collect();
    let monotone = r.windows(2).all(|w| w[1] <= w[0]) || r.windows(2).all(|w| w[1] >= w[0]);
    let max_step_drift = r.windows(2).map(|w| (w[1] - w[0]).abs() / w[0].abs()).fold(0.0, f64::max);
    let total_drift = match (r.first(), r.last()) {
        (Some(a), Some(b)) => (b - a).abs() / a.abs(),
        _ => 0.0,
    };
    Ok(GrowthProfile { c, rows, monotone, max_step_drift, total_drift })
}
