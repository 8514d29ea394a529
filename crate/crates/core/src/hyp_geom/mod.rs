//! Upper half-plane/space and hyperboloid models of hyperbolic space:
//! displacement functions, translation lengths and the isometry trichotomy.

mod classify;
mod lorentz;
mod moebius;
mod point;

pub use classify::{
    axis_point, classify, conjugate, displacement, same_axis, translation_length, IsometryClass, MoebiusClass,
    TranslationLength, BORDERLINE_BAND, PARABOLIC_TOL,
};
pub use lorentz::{minkowski, HyperboloidPoint, LorentzClassification, LorentzIsometry};
pub use moebius::{Field, MoebiusIsometry};
pub use point::{distance, geodesic_apex, BoundaryPoint, HPoint};

use serde::Serialize;

use crate::linalg::MatrixElement;

/// Norms `||g_n gamma g_n^{-1} - 1||` along a sequence of conjugators.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionWitness {
    pub norms: Vec<f64>,
    /// The norms decrease monotonically and end below 1% of where they
    /// started: the conjugates tend to the identity.
    pub escaping: bool,
}

pub fn sequence_contraction_witness<M: MatrixElement>(g_seq: &[M], gamma: &M) -> crate::Result<ContractionWitness> {
    let mut norms = Vec::with_capacity(g_seq.len());
    for g in g_seq {
        let c = g.mul(gamma).mul(&g.try_inv()?);
        norms.push(c.dist_to_identity());
    }
    let monotone = norms.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let escaping = match (norms.first(), norms.last()) {
        (Some(&first), Some(&last)) if norms.len() > 1 => monotone && first > 0.0 && last < 0.01 * first,
        _ => false,
    };
    Ok(ContractionWitness { norms, escaping })
}

impl MatrixElement for MoebiusIsometry {
    type Key = [i64; 8];
    fn mul(&self, other: &Self) -> Self {
        self.compose(other)
    }
    fn try_inv(&self) -> crate::Result<Self> {
        Ok(self.inverse())
    }
    fn identity_like(&self) -> Self {
        MoebiusIsometry::identity(self.field())
    }
    fn norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
    fn dist_to_identity(&self) -> f64 {
        MoebiusIsometry::dist_to_identity(self)
    }
    fn is_identity_within(&self, tol: f64) -> bool {
        self.is_identity(tol)
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        MoebiusIsometry::approx_eq(self, other, tol)
    }
    fn key(&self) -> [i64; 8] {
        self.dedup_key(crate::linalg::KEY_SCALE)
    }
}
