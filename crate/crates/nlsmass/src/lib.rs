//! Radial ground states, normalized solutions and the Pohozaev/mountain-pass
//! machinery for nonlinear Schrödinger equations at the L²-critical power.

pub mod augmented;
pub mod cli;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod interp;
pub mod nonlinearity;
pub mod normalized;
pub mod ode;
pub mod paths;
pub mod plot;
pub mod profiles;
pub mod quad;
pub mod shooting;

pub use error::{Error, Result};
