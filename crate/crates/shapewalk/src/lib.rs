//! Shapes of 2-lattices in R^3.
//!
//! A 2-lattice is a rank-2 discrete subgroup of R^3; the space `X` of their
//! homothety classes fibres over the Grassmannian of planes with modular
//! fibres. This crate makes the algebra and dynamics on `X` computable:
//!
//! * [`exact`] — arbitrary-precision rational vectors/matrices, wedge
//!   products, integer kernels, and the exact homothety decision.
//! * [`lattice2`] — shapes via reduction to the modular fundamental domain,
//!   heights, shortest vectors and expansion cocycles.
//! * [`groups`] — the quadratic form `Q(v) = 2 v1 v3 - v2^2`, its unipotent
//!   generators, SL3(Z) generator sets, finitely supported measures, word
//!   sampling and the Moebius action on the projective line.
//! * [`walk`] — Monte Carlo trajectories on `X`, goodness of fit against the
//!   hyperbolic reference, Lyapunov statistics and the height-contraction
//!   probe.
//! * [`section`] — the equivariant section over the circle of isotropic
//!   planes, verified exactly.
//! * [`ortho`] — orthogonal-shape sampling along the integer orbit of
//!   (1,1,1) and the duality identity it rests on.
//! * [`dioph`] — continued fractions with certified digits, directional
//!   2-lattices, diagonal-flow scans, totally real cubic fields and unit
//!   searches.

pub mod dioph;
pub mod error;
pub mod exact;
pub mod groups;
pub mod lattice2;
pub mod ortho;
pub mod output;
pub mod rng;
pub mod scalar;
pub mod section;
pub mod walk;

pub use error::{Error, Result};
pub use exact::{Mat2, Mat3, Vec3};
pub use lattice2::{Lattice2, ShapePoint};
pub use scalar::{Rat, Scalar};
