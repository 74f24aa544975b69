//! sdplab: a dense semidefinite programming laboratory.
//!
//! The crate studies what happens to the optimal value of a (possibly
//! singular) SDP under two-parameter regularization: a shift of the dual
//! slack and a shift of the primal right-hand side. It provides
//!
//! * dense symmetric matrix kernels ([`symmat`]),
//! * problem data and the perturbation machinery ([`model`]),
//! * infeasible interior-point solvers with full iterate traces ([`ipm`]),
//! * directional value limits and angle sweeps ([`ray`]),
//! * a feasibility status classifier ([`classify`]),
//! * worked example problems with closed-form references ([`gallery`]),
//! * SDPA sparse format and JSON/CSV input-output ([`io`]).
//!
//! The `examples/` directory is the guided tour; each example exercises one
//! capability end to end.

pub mod classify;
pub mod error;
pub mod gallery;
pub mod io;
pub mod ipm;
pub mod model;
pub mod ray;
pub mod symmat;

pub mod cli;

pub use error::{Error, Result};
pub use model::{PerturbationPair, SdpProblem};
pub use symmat::SymMat;
