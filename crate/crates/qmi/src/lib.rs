//! Quantum micromechanical interferometry of levitated microspheres.
//!
//! This crate propagates the center-of-mass state of a levitated sphere
//! under position-localization decoherence, applies coherent inflation
//! (inverted-harmonic stretching of the phase-space moments), synthesizes
//! double-slit interference patterns with decoherence blurring, and computes
//! the environmental budgets (pressure, temperature, vibration) needed to
//! reach a target mass/superposition-size regime — including the parameter
//! window in which Diósi–Penrose gravitational collapse can be falsified.
//!
//! Start with the runnable programs in `examples/` (one per capability), or
//! with the `simulate` binary for batch/config-file driven runs.

pub mod cli;
pub mod config;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod interferometry;
pub mod protocol;
pub mod quantities;
pub mod report;
pub mod state;

pub use error::{Error, Result};
pub use quantities::{Constants, Dimension, Quantity, Sphere, CONSTANTS};
pub use state::{GaussianState, StateDiagnostics};
