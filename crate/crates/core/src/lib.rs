//! Computational laboratory for lattices in locally compact groups.
//!
//! The crate is organized by geometry and by theme:
//!
//! * [`hyp_geom`] and [`euc_geom`]: isometries of hyperbolic and Euclidean
//!   space, displacement functions, min-sets and axes.
//! * [`smallness`]: iterated commutators near the identity, nilpotency,
//!   Jordan indices, quasi-morphism defects and short subgroups.
//! * [`lattice_lab`]: finitely generated groups acting on H^2 / H^3 / R^n,
//!   word balls, injectivity radius, thick-thin scans, the psi Morse function,
//!   covolumes, recurrence and span checks.
//! * [`nerve`]: epsilon-nets, nerve complexes, bounded presentations and
//!   abelianization.
//! * [`chabauty`]: closed subgroups of R^n, Chabauty distance, limits and
//!   Mahler-type compactness.
//! * [`solvable`]: exact arithmetic for a non-uniform lattice in a metabelian
//!   group and for the integral Heisenberg lattice.

pub mod chabauty;
pub mod error;
pub mod euc_geom;
pub mod hyp_geom;
pub mod lattice_lab;
pub mod linalg;
pub mod nerve;
pub mod optimize;
pub mod presets;
pub mod sampling;
mod serde_rational;
pub mod smallness;
pub mod solvable;

pub use error::{LabError, Result};
pub use euc_geom::EuclideanIsometry;
pub use hyp_geom::{HPoint, IsometryClass, LorentzIsometry, MoebiusIsometry};
pub use lattice_lab::{FinitelyGeneratedGroup, Isometry, WordBall};
pub use linalg::{MatrixElement, RatMatrix};
