//! Simulation of a DFT-based wavelength lock for a temperature-tuned SPDC
//! source: thermal plant, coincidence-histogram measurement, threshold-gated
//! PID compensation and Allan-deviation stability analysis.

pub mod calibration;
pub mod controller;
pub mod dft;
pub mod error;
pub mod harness;
pub mod plant;
pub mod rng;
pub mod stability;

pub use error::{Error, Result};
