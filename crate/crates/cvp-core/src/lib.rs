//! Solver suite for causal variational principles on finite point spaces.
//!
//! The crate minimizes the inner action over nonnegative measures, solves
//! initial value problems with external potentials, optimizes the external
//! potential (problems A-D), and certifies the uniqueness structures
//! (dependent sets, domain of dependence, definite sets, solution germs,
//! maximal optimal solution). Continuous examples enter through the
//! [`continuum`] module, which discretizes heat-kernel Lagrangians on the
//! unit circle.

pub mod continuum;
pub mod dependence;
mod error;
mod linalg;
pub mod ivp;
pub mod model;
pub mod optimizer;
pub mod polytope;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    action_value, apriori_volume_bound, el_residuals, rescale, validate_lagrangian, ElReport,
    InitialData, LagrangianMatrix, Measure, PointSpace, Potential, ProblemInstance, SignedMeasure,
    SolutionRecord,
};
