//! Spectrum-access decisions for a cognitive relay operating as an underlay
//! secondary user.
//!
//! The crate covers the whole pipeline:
//!
//! - [`channel_models`]: log-distance, ITU-R indoor and WINNER II path loss,
//!   plus dB/linear link-budget plumbing.
//! - [`fading`]: normal shadowing and exponential/Gamma SNR laws, the
//!   incomplete-gamma kernel they rest on, and seeded samplers.
//! - [`estimation`]: least-squares path-loss fitting, maximum-likelihood
//!   fading fits, empirical CDFs and CDF mean squared error.
//! - [`constraints`]: interference and capacity outage checks and the
//!   AND-rule decision matrix.
//! - [`scenario`]: a synthetic deployment generator and Monte Carlo oracle.
//! - [`cli`]: the `cogrelay` command-line tool.
//! - [`io`]: the CSV and config-file formats used by the command-line tool.

pub mod channel_models;
pub mod cli;
pub mod constraints;
pub mod error;
pub mod estimation;
pub mod fading;
pub mod io;
pub mod scenario;

pub use error::{Error, Result};

/// Converts a dB (or dBm) quantity to a linear ratio (or milliwatts).
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear ratio (or milliwatts) to dB (or dBm).
#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
