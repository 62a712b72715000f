//! High-order finite-difference solvers for hyperbolic conservation laws:
//! upwind WENO in space, one-step approximate Lax-Wendroff in time with
//! optional CWENO fluctuation control, and a TVD-RK3 baseline.

// `!(x > 0.0)` is used on purpose so NaN fails admissibility checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod convergence;
pub mod cweno;
pub mod equations;
pub mod error;
pub mod grid;
pub mod lw;
pub mod norms;
pub mod output;
pub mod problems;
pub mod rk;
pub mod run;
pub mod solver;
pub mod stencil;
pub mod weno;

pub use error::{Result, SolverError};
