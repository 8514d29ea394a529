//! Discrete groups acting on H^2, H^3 and R^n: word balls, injectivity
//! radius, thick-thin scans, the psi function, covolumes, recurrence and
//! linear spans.

mod covolume;
mod group;
mod psi;
mod recurrence;
mod thick_thin;

pub use covolume::{
    adaptive_simpson, covolume_h2, polygon_angles, regular_polygon, standard_domain_area, Covolume, DomainSpec,
    PolygonVertex,
};
pub use group::{format_word, BallEntry, FinitelyGeneratedGroup, Isometry, WordBall, WORD_BALL_CAP};
pub use psi::{
    gradient_lemma_check, psi_gradient, psi_value, Bump, GradientLemmaReport, GradientViolation, PsiField, PsiValue,
    DOMAIN_TOL,
};
pub use recurrence::{recurrence_search, span_check, span_of_matrices, RecurrenceHits, RecurrenceTarget, SpanReport};
pub use thick_thin::{
    injectivity_radius, thick_thin_scan, InjectivityRadius, SampleRegion, ThickThinReport, ThinComponentReport,
    ThinKind,
};
