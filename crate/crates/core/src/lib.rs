//! Numerical study of the rotationally invariant minimal surfaces
//! (catenoids) of the Heisenberg groups `Nil(2n+1)` with their standard
//! left-invariant metric.

pub mod checks;
pub mod error;
pub mod highdim;
pub mod index;
pub mod jacobi;
pub mod nilgeometry;
pub mod numerics;
pub mod profile;
pub mod stability;

pub use error::{Error, Result};
