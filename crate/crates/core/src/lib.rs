//! Unfitted RBF-FD least-squares discretization of 2D linear elasticity.
//!
//! The crate is organised bottom-up:
//!
//! * [`rbffd`] builds stencils and sparse evaluation/differentiation operators.
//! * [`smoothing`] turns noisy closed polygons and boundary samples into smooth
//!   periodic curves.
//! * [`pointset`] lays out the background node grid and the geometry-conforming
//!   evaluation points.
//! * [`elasticity`] assembles and solves the oversampled Navier-Cauchy system
//!   and post-processes strain, stress and von Mises fields.
//! * [`harness`] runs convergence studies against manufactured or
//!   self-reference solutions.
//! * [`cli`] holds the config format and the command-line driver.

pub mod cli;
pub mod elasticity;
pub mod error;
pub mod harness;
pub mod rbffd;
pub mod pointset;
pub mod smoothing;
pub mod sparse;

pub use error::{Error, Result};
