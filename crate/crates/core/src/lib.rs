//! Optimization of n-sparse measures by particle gradient descent.
//!
//! A sparse measure is a uniform mixture of n point masses in R^d. This crate
//! provides the pieces needed to optimize functionals of such measures and to
//! test the structural properties (displacement convexity, smoothness,
//! contraction) that make the optimization work:
//!
//! - [`measure`]: the particle container, seeded initializers, serialization.
//! - [`transport`]: optimal permutation coupling between equal-size measures,
//!   squared transport cost, displacement interpolation.
//! - [`objectives`]: energy distance (discrete and uniform targets), MMD with
//!   pluggable kernels, squared transport cost to a target, an orthonormal
//!   tensor objective on the sphere, a single-layer zero-one network loss on
//!   the circle, and a quadratic well used as a test fixture.
//! - [`optim`]: (noisy) particle gradient descent with stepsize schedules,
//!   trajectory logging, and seeded batch runs.
//! - [`analysis`]: inequality checkers (displacement Jensen, star convexity,
//!   smoothness consequences, per-step contraction) plus a finite-difference
//!   gradient oracle and planted counterexample fixtures.
//! - [`frankwolfe`]: Frank-Wolfe over measures on a 1-D grid with uniform
//!   rounding, and the sparse-approximation error sweep.
//! - [`suite`]: the seeded property catalog behind `verify`-style gates.
//!
//! Evaluations accumulate in a canonical particle order, so objective values
//! are bitwise invariant under particle permutation and independent of thread
//! count (the `parallel` feature switches work distribution, not results).

// Validation guards are written `!(a < b)` on purpose: NaN fails the guard,
// while the un-negated `a >= b` would wave it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod exec;
pub mod frankwolfe;
pub mod measure;
pub mod objectives;
pub mod optim;
pub mod suite;
pub mod transport;

pub use error::{Error, Result};
pub use measure::{InitLaw, SparseMeasure};
pub use objectives::{Gradient, Objective, Regularity};
