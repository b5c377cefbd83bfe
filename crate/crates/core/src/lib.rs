//! Entropy-stable nodal discontinuous Galerkin solver for the two-fluid
//! relativistic plasma equations.

pub mod cases;
pub mod cli;
pub mod dgsolver;
pub mod entflux;
pub mod error;
pub mod physflux;
pub mod sbp;
pub mod state;
pub mod timeint;
pub mod verify;

pub use error::{Error, Result};
