//! Smallness near the identity: commutator ladders and nilpotency, Jordan
//! indices of finite groups, quasi-morphism defects and Margulis short
//! subgroups.

mod jordan;
mod ladder;
mod margulis;

pub use jordan::{
    circle_distance, cyclic_circle_defect, icosahedral_group, jordan_abelian_index, jordan_abelian_index_with,
    quasi_morphism_defect, quaternion_group, rotation3, so3_angle, su2_angle, FiniteGroup, JordanReport, CLOSURE_CAP,
};
pub use ladder::{
    commutator, commutator_ladder, commutator_ladder_with, nilpotency_class, CommutatorLadder, MatrixSet,
    NilpotencyReport, NilpotencyVerdict, LEVEL_CAP,
};
pub use margulis::{margulis_short_subgroup, MargulisReport, ShortElement, ShortSubgroupKind, ELEMENTARY_TOL};
