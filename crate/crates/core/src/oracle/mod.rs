//! Brute-force reference computations on a truncated Fock space.
//!
//! Nothing in here expands in `theta`: the thermal coherent state is built by
//! applying the two-mode squeeze to `|alpha>|alpha~>` and probabilities are
//! read off directly. The operator identities behind the series are checked
//! as matrix equations on the part of the space the cutoff cannot reach.

pub mod fock;
pub mod identities;
pub mod rabi;
pub mod state;

pub use fock::{Basis, FockMatrix, Register, C64};
pub use identities::{verify_identity, Identity};
pub use rabi::{rabi_short_time_coefficient, RabiFit, RabiFitConfig};
pub use state::{
    coherent_vector, exact_pg, four_component_pg, mean_photon_number, reduced_thermal_density_checks,
    two_mode_squeeze_apply, ThermalCoherentState, ThermalTarget,
};

use crate::error::{Error, Result};

/// Truncation and tolerance knobs shared by the oracle routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Levels kept per boson mode.
    pub dim: usize,
    /// Stopping tolerance of the exponential series, also the ceiling on the
    /// population left in the top level after a squeeze.
    pub taylor_tol: f64,
    /// Identity comparisons keep only states with total excitation
    /// `<= dim - safe_buffer`.
    pub safe_buffer: usize,
    /// Constant `c` inside `B = a^dagger a + c` for identity checks. Integer
    /// values keep scaled-basis arithmetic exact.
    pub identity_c: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { dim: 48, taylor_tol: 1e-14, safe_buffer: 8, identity_c: 1.0 }
    }
}

impl OracleConfig {
    /// Smaller cutoff used for the operator identity catalog.
    pub fn identities() -> Self {
        OracleConfig { dim: 24, ..Self::default() }
    }

    pub fn with_dim(self, dim: usize) -> Self {
        OracleConfig { dim, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 8 {
            return Err(Error::Domain { what: "oracle dim must be >= 8", value: self.dim as f64 });
        }
        if !(self.taylor_tol > 0.0) {
            return Err(Error::Domain { what: "taylor_tol must be > 0", value: self.taylor_tol });
        }
        if self.safe_buffer >= self.dim {
            return Err(Error::Domain {
                what: "safe_buffer must be below dim",
                value: self.safe_buffer as f64,
            });
        }
        Ok(())
    }

    /// Largest total excitation kept in identity comparisons.
    pub fn safe_excitation(&self) -> usize {
        self.dim - self.safe_buffer
    }
}
