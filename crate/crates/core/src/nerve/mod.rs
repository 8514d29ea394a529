//! Epsilon-nets, nerves of ball covers and the bounded presentations they
//! carry: generators are non-tree edges, relators come from triangles and
//! have length at most 3.

mod abelian;
mod complex;
mod counting;
mod space;

pub use abelian::{abelianization, smith_diagonal, AbelianInvariants};
pub use complex::{
    build_eps_net, degree_bound, nerve, presentation_from_nerve, EpsNet, NerveComplex, Presentation, TreeChoice,
    NET_CAP,
};
pub use counting::{count_presentations, growth_profile, ln_big, size_bound, word_count, GrowthProfile, GrowthRow};
pub use space::{
    euclidean_minimax, hyperbolic_minimax, EuclideanPlane, FlatTorus, HyperbolicPlane, HyperbolicSurface, NetSpace,
};
