//! Numerical laboratory for the one-dimensional degenerate wave equation
//!
//! ```text
//! u_tt - (x^alpha u_x)_x = f   on (0,T) x (0,1)
//! ```
//!
//! with `u(t,1) = 0` and, at the degenerate end `x = 0`, either a Dirichlet
//! condition (weakly degenerate, `alpha < 1`) or the weighted Neumann condition
//! `(x^alpha u_x)(t,0) = 0` (strongly degenerate, `alpha >= 1`).
//!
//! The crate is organised bottom-up:
//!
//! * [`spaces`]: meshes with exact `x^alpha` cell integrals, P1 fields, weighted
//!   norms and the explicit-constant embedding checks.
//! * [`elliptic`]: the degenerate Poisson problem and the `H^{-1}_alpha` norm.
//! * [`wave`]: weak solutions by Newmark / leapfrog time stepping, energy,
//!   boundary flux recovery, manufactured solutions and random data suites.
//! * [`multiplier`]: the piecewise multiplier profile and the multiplier
//!   identity residual.
//! * [`estimators`]: the boundary-neighbourhood functionals and the ratio sweeps.
//! * [`transposition`]: very weak solutions through the lifting, the duality
//!   residual and the liminf experiment.
//! * [`io`]: CSV / JSON / binary output helpers.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod estimators;
pub mod io;
pub mod linalg;
pub mod multiplier;
pub mod quadrature;
pub mod spaces;
pub mod transposition;
pub mod wave;

pub use error::{Error, Result};
pub use spaces::{DegeneracyParam, Grid, Regime, SpaceField, SpaceTimeField, TimeSeries};
