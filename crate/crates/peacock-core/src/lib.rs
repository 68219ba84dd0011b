//! Core library: potentials, thimbles, state integrals, resummation.

pub mod error;
pub mod faddeev;
pub mod numerics;
pub mod surface;

pub use error::{Error, Result};
