use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::group::{FinitelyGeneratedGroup, WORD_BALL_CAP};
use crate::error::{LabError, Result};
use crate::hyp_geom::MoebiusIsometry;
use crate::linalg::numerical_rank;

/// The ambient group and the element whose powers are tested.
#[derive(Debug, Clone)]
pub enum RecurrenceTarget {
    /// `Z^k <= R^k`, `g` a translation vector.
    Translation(Vec<f64>),
    /// `SL_2(Z) <= SL_2(R)`, `g` a real matrix of determinant one.
    Sl2(DMatrix<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceHits {
    pub hits: Vec<u64>,
    pub horizon: u64,
    pub epsilon: f64,
}

/// Exponents `n <= horizon` for which `Omega^{-1} g^n Omega` meets the
/// lattice, `Omega` the `epsilon`-ball around the identity.
///
/// For translations this is `dist(n g, Z^k) < 2 epsilon`. For `SL_2` the
/// test is sufficient rather than exact: `g^n` is rounded to an integer
/// matrix `gamma`, which must have determinant one, and
/// `||g^{-n} gamma - 1|| < epsilon` puts `gamma` in `g^n Omega`.
pub fn recurrence_search(target: &RecurrenceTarget, epsilon: f64, horizon: u64) -> Result<RecurrenceHits> {
    if !(epsilon > 0.0) || horizon < 1 {
        return Err(LabError::pre("need epsilon > 0 and horizon >= 1"));
    }
    let mut hits = Vec::new();
    match target {
        RecurrenceTarget::Translation(v) => {
            for n in 1..=horizon {
                let d2: f64 = v
                    .iter()
                    .map(|x| {
                        let y = n as f64 * x;
                        (y - y.round()).powi(2)
                    })
                    .sum();
                if d2.sqrt() < 2.0 * epsilon {
                    hits.push(n);
                }
            }
        }
        RecurrenceTarget::Sl2(g) => {
            if g.nrows() != 2 || g.ncols() != 2 {
                return Err(LabError::DimensionMismatch { expected: 2, found: g.nrows() });
            }
            if (g.determinant() - 1.0).abs() > 1e-9 {
                return Err(LabError::pre("matrix must have determinant one"));
            }
            let id = DMatrix::<f64>::identity(2, 2);
            let mut p = id.clone();
            for n in 1..=horizon {
                p = &p * g;
                let gamma = p.map(|x| x.round());
                let ints = [gamma[(0, 0)], gamma[(0, 1)], gamma[(1, 0)], gamma[(1, 1)]].map(|x| x as i64);
                if ints[0] * ints[3] - ints[1] * ints[2] != 1 {
                    continue;
                }
                // inverse of p (determinant one) is adj(p)
                let pinv = DMatrix::from_row_slice(2, 2, &[p[(1, 1)], -p[(0, 1)], -p[(1, 0)], p[(0, 0)]]);
                if (pinv * &gamma - &id).norm() < epsilon {
                    hits.push(n);
                }
            }
        }
    }
    Ok(RecurrenceHits { hits, horizon, epsilon })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    pub dimension: usize,
    /// Row-major entries of a ball element with distinct eigenvalues.
    pub regular_witness: Option<Vec<f64>>,
    pub word_ball_radius: usize,
}

/// Dimension of the linear span of matrices in `M_d(R)` and a regular
/// element (distinct eigenvalues) among them, in order.
pub fn span_of_matrices(ms: &[DMatrix<f64>]) -> (usize, Option<DMatrix<f64>>) {
    if ms.is_empty() {
        return (0, None);
    }
    let cols: Vec<DVector<f64>> =
        ms.iter().map(|m| DVector::from_iterator(m.len(), m.transpose().iter().copied())).collect();
    let dim = numerical_rank(&DMatrix::from_columns(&cols), 1e-10);
    let witness = ms.iter().find(|m| has_distinct_eigenvalues(m)).cloned();
    (dim, witness)
}

fn has_distinct_eigenvalues(m: &DMatrix<f64>) -> bool {
    let ev = m.complex_eigenvalues();
    let scale = 1.0 + m.norm();
    ev.iter().enumerate().all(|(i, a)| ev.iter().skip(i + 1).all(|b| (a - b).norm() > 1e-7 * scale))
}

pub fn span_check(group: &FinitelyGeneratedGroup<MoebiusIsometry>, radius: usize) -> Result<SpanReport> {
    if radius < 1 {
        return Err(LabError::pre("word-ball radius must be at least 1"));
    }
    let ball = group.word_ball(radius, WORD_BALL_CAP)?;
    let ms: Vec<DMatrix<f64>> = ball.elements().map(|g| g.to_real_matrix()).collect();
    let (dimension, w) = span_of_matrices(&ms);
    Ok(SpanReport {
        dimension,
        regular_witness: w.map(|m| m.transpose().iter().copied().collect()),
        word_ball_radius: radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_translation_recurs_at_even_times() {
        let h = recurrence_search(&RecurrenceTarget::Translation(vec![0.5]), 0.1, 20).unwrap();
        assert_eq!(h.hits, (1..=10).map(|k| 2 * k).collect::<Vec<_>>());
    }

    #[test]
    fn irrational_translation_recurs() {
        let h = recurrence_search(&RecurrenceTarget::Translation(vec![2f64.sqrt() - 1.0]), 0.05, 100).unwrap();
        // frac(n (sqrt 2 - 1)) first comes within 0.1 of an integer at n = 5
        assert_eq!(h.hits.first(), Some(&5));
    }

    #[test]
    fn rotation_by_one_radian_recurs_in_sl2z() {
        let (s, c) = 1f64.sin_cos();
        let g = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let h = recurrence_search(&RecurrenceTarget::Sl2(g), 0.05, 10_000).unwrap();
        assert!(!h.hits.is_empty());
        assert_eq!(h.hits[0], 11);
    }
}
