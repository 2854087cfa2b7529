//! Exact Slodowy slices of nilpotent orbits in classical Lie algebras,
//! their transverse Poisson brackets, and argument-shift integrable systems.

pub mod argshift;
pub mod certificate;
pub mod dirac;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod invariants;
pub mod liealg;
pub mod orbits;
pub mod poly;
pub mod sampling;
pub mod slice;
pub mod suites;

pub use error::{Error, Result};
