//! Photon correlation statistics of light scattered by ensembles of
//! independent, weakly driven two-level emitters.
//!
//! The library computes structure factors (plain and generalized through
//! integer-partition combinatorics), the closed-form second-order
//! autocorrelation `g2(k)` with its brute-force oracle, asymptotic
//! super/antibunching predictions, angular maps and scans over observation
//! directions, ensemble sweeps with reproducible seeding, and power-law
//! scaling fits.
//!
//! Conventions used throughout:
//!
//! - positions are dimensionless, `k_L * R` (position times the optical
//!   wavenumber), so phases are plain dot products;
//! - wave vectors `k_obs`, `k_laser` are unit vectors and the scattering
//!   vector is `k = k_obs - k_laser`;
//! - `s` is the saturation parameter of the resonant drive; the number of
//!   excitations `sN` controls every asymptotic regime.
//!
//! Start from the `examples/` directory for runnable walkthroughs of each
//! capability, or from the `photon-stats` binary for the file-based CLI.

pub mod analysis;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod structure;
pub mod vec3;
pub mod verify;

pub use error::{Error, Result};
