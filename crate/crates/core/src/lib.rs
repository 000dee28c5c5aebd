//! Workbench for the semilinear telegraph equation `u_tt - a^2 u_xx - f(t,x,u) = F`
//! on the quarter plane with Dirichlet or Neumann data at `x = 0`.
//!
//! * [`matching`] audits corner compatibility conditions and issues
//!   nonexistence certificates when they fail.
//! * [`energy`] evaluates the negative-energy blow-up criterion.
//! * [`exact`] builds the power-law solutions `beta (t - s)^gamma` that make
//!   the Hölder problem non-unique.
//! * [`solver`] is an explicit leapfrog scheme used to demonstrate both, and
//!   [`demos`] packages the two-continuation nonuniqueness run.
//! * [`exprlang`] compiles text expressions into [`ScalarFn`]s.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod demos;
pub mod energy;
pub mod error;
pub mod exact;
pub mod exprlang;
pub mod matching;
pub mod numerics;
pub mod problem;
pub mod solver;

pub use error::{DomainError, Error, Result};
pub use problem::{BoundaryKind, MixedProblem, ScalarFn};
