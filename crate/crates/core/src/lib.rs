//! Thermal Jaynes-Cummings dynamics in the Thermo-Field-Dynamics picture.
//!
//! The crate is `no_std` (it needs `alloc`) and splits into:
//!
//! - [`model`]: physical parameters, the detuning parameter `c`, the spectral
//!   functions `g1`/`g2` and the boson/fermion thermal parameters.
//! - [`zero_temp`]: exact zero-temperature inversion, the envelope
//!   approximation, time scales, the dressed spectrum and the short-time law
//!   with counter-rotating terms.
//! - [`tfd`]: the low-temperature expansion of the ground-state probability in
//!   powers of the boson parameter `theta`, through third order.
//! - [`oracle`]: truncated-Fock brute force used to check the expansion and the
//!   operator identities it is built from.
//! - [`experiments`]: traces, period estimates, line fits, min/max tables and
//!   spectral scans.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod experiments;
pub mod math;
pub mod model;
pub mod oracle;
pub mod tfd;
pub mod zero_temp;

pub use error::{Error, Result};
pub use model::{DerivedParams, ModelParams, ThermalPoint};

/// Crate version, echoed into output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
