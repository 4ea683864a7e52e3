//! Computational engine for Lorentzian conformal geometry: plane waves and
//! their Heisenberg Killing algebras, curvature and conformal Killing checks,
//! gradings and Jordan decompositions in `co(1, n+1)`, and Penrose limits.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod liealg;
pub mod penrose;
pub mod planewave;
pub mod smoothfield;

pub use error::{Error, Result};
