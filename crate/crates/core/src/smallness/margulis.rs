use serde::Serialize;

use crate::error::{LabError, Result};
use crate::hyp_geom::{classify, same_axis, BoundaryPoint, HPoint, IsometryClass, MoebiusClass, MoebiusIsometry};
use crate::lattice_lab::{format_word, FinitelyGeneratedGroup, WORD_BALL_CAP};

/// Agreement tolerance for axes and fixed points of short elements.
pub const ELEMENTARY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ShortSubgroupKind {
    /// No nontrivial element is short.
    Trivial,
    /// All short elements fix one interior point.
    Elliptic {
        fixed: HPoint,
    },
    /// All short elements are parabolic with one boundary fixed point.
    Parabolic {
        fixed: BoundaryPoint,
    },
    /// All short elements are hyperbolic with one axis.
    Hyperbolic {
        axis: (BoundaryPoint, BoundaryPoint),
    },
    NotElementary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShortElement {
    pub word: String,
    pub displacement: f64,
    pub class: String,
    #[serde(skip)]
    pub element: MoebiusIsometry,
}

#[derive(Debug, Clone, Serialize)]
pub struct MargulisReport {
    pub epsilon: f64,
    pub word_ball_radius: usize,
    pub short: Vec<ShortElement>,
    pub kind: ShortSubgroupKind,
}

/// The short set `{gamma : d(gamma x, x) <= eps}` within the word ball and
/// the type of the subgroup it generates, decided by pairwise agreement of
/// fixed points and axes.
pub fn margulis_short_subgroup(
    group: &FinitelyGeneratedGroup<MoebiusIsometry>,
    x: &HPoint,
    epsilon: f64,
    radius: usize,
) -> Result<MargulisReport> {
    if radius < 1 {
        return Err(LabError::pre("word-ball radius must be at least 1"));
    }
    let ball = group.word_ball(radius, WORD_BALL_CAP)?;
    let mut short = Vec::new();
    let mut classes: Vec<MoebiusClass> = Vec::new();
    for e in ball.nontrivial() {
        let d = e.element.apply(x)?.distance_to(x);
        if d <= epsilon {
            let c = classify(&e.element)?;
            short.push(ShortElement {
                word: format_word(&e.word),
                displacement: d,
                class: c.name().into(),
                element: e.element,
            });
            classes.push(c);
        }
    }
    let kind = elementary_kind(&classes);
    Ok(MargulisReport { epsilon, word_ball_radius: radius, short, kind })
}

fn elementary_kind(classes: &[MoebiusClass]) -> ShortSubgroupKind {
    let Some(first) = classes.first() else {
        return ShortSubgroupKind::Trivial;
    };
    let kind = match first {
        IsometryClass::Elliptic { fixed } => ShortSubgroupKind::Elliptic { fixed: *fixed },
        IsometryClass::Parabolic { fixed } => ShortSubgroupKind::Parabolic { fixed: *fixed },
        IsometryClass::Hyperbolic { axis, .. } => ShortSubgroupKind::Hyperbolic { axis: *axis },
        IsometryClass::Identity => return ShortSubgroupKind::NotElementary,
    };
    let agree = classes.iter().all(|c| match (&kind, c) {
        (ShortSubgroupKind::Elliptic { fixed: p }, IsometryClass::Elliptic { fixed }) => {
            p.distance_to(fixed) <= ELEMENTARY_TOL
        }
        (ShortSubgroupKind::Parabolic { fixed: p }, IsometryClass::Parabolic { fixed }) => {
            p.approx_eq(fixed, ELEMENTARY_TOL)
        }
        (ShortSubgroupKind::Hyperbolic { axis: a }, IsometryClass::Hyperbolic { axis, .. }) => {
            same_axis(a, axis, ELEMENTARY_TOL)
        }
        _ => false,
    });
    if agree {
        kind
    } else {
        ShortSubgroupKind::NotElementary
    }
}
