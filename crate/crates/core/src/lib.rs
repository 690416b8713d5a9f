//! Simulation and property harness for scalar degenerate anisotropic
//! convection-diffusion equations `u_t + div φ(u) - D²·A(u) = 0`.

pub mod error;
pub mod fsutil;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod json;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
