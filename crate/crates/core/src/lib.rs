//! Simulation and stability analysis of a capital-education growth model.
//!
//! Output is produced by a Cobb–Douglas law in capital `K` and the stock of
//! education and expertise `E`. The crate integrates three variants of the
//! dynamics (basic, chaotically modulated capital investment, and
//! consumption-targeting control of education investment), computes their
//! equilibria and spectra in closed form, and reproduces the standard
//! experiments through JSON scenarios and the `capedu` CLI.

pub mod analysis;
pub mod chaos;
pub mod cli;
pub mod control;
pub mod error;
pub mod integrator;
pub mod model;
pub mod scenario_io;
pub mod simulation;

pub use error::{Error, Result};
