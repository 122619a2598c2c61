//! Explicit bounds for hyperbolic 3-manifolds whose optimal Margulis number
//! is small, together with brute-force and geometric checks of every
//! quantity the bounds are built from.
//!
//! - [`freegroup`]: reduced words in the rank-2 free group, word balls and
//!   the cyclic-subgroup counting lemma.
//! - [`hypgeom`]: the upper half-space model: distance, isometry action,
//!   ball volumes, triangle areas and the Jorgensen value.
//! - [`bounds`]: `N(λ)` and the volume, index and rank bounds.
//! - [`packing`]: the coset-counting versus ball-packing comparison and the
//!   short-relation search.
//! - [`precise`]: 256-bit evaluation used to certify constants.

pub mod bounds;
pub mod freegroup;
pub mod hypgeom;
pub mod numeric;
pub mod packing;
pub mod precise;

pub use bounds::{BoundParams, BoundsError, BoundsReport, Precision};
pub use freegroup::{Letter, ReducedWord, WordBall};
pub use hypgeom::{GeneratorPair, Isometry, Point, Triangle};
pub use packing::{PackingError, PackingReport};
