//! Truncated branching random walks with polynomially decaying dispersal.
//!
//! The crate simulates birth processes whose local birth rate is capped at one,
//! `b(x, η) = 1 ∧ Σ_y η(y) a(x - y)`, on the integer lattice and on the real
//! line, and integrates the deterministic nonlocal equation
//! `∂t u = min{a * u, 1}` that approximates their rescaled density.
//!
//! * [`kernel`]: the dispersal kernels, their normalisation, tails and samplers.
//! * [`lattice`]: event-driven simulation on `ℤ`, the tip-view/dominating
//!   coupling, the nearest-neighbour comparison process and the tip
//!   compensator.
//! * [`continuum`]: thinning simulation on `ℝ` and its rounding to the lattice.
//! * [`meso`]: grid solver for the nonlocal equation, front tracking and the
//!   numerical checks of the sub-solution and weighted-norm estimates.
//! * [`analysis`]: speed fits, doubling statistics and series/large-deviation
//!   side checks.
//! * [`experiment`] and [`verify`]: configuration, batch runs with manifests,
//!   and the full verification suite.

pub mod analysis;
pub mod continuum;
pub mod error;
pub mod experiment;
pub mod fenwick;
pub mod kernel;
pub mod lattice;
pub mod meso;
pub mod output;
pub mod quad;
pub mod rng;
pub mod series;
pub mod trajectory;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::{KernelSpec, KernelVariant};
pub use trajectory::{TipSample, TipTrajectory};
