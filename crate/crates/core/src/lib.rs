//! Near-field 3D channel estimation for uniform-circular-array XL-MIMO
//! receivers.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: Bessel J0, its first zero, threshold inversion and a
//!   rank-revealing complex least-squares solver.
//! - [`channel`]: UCA geometry, spherical-wave steering vectors and OFDM
//!   multipath channel synthesis.
//! - [`codebook`]: the Bessel-zero spherical-domain dictionary plus the
//!   polar and angular baselines, coherence diagnostics and export.
//! - [`estimator`]: combining matrices, measurement synthesis, S-SOMP,
//!   least squares and the genie-aided oracle.
//! - [`harness`]: seeded Monte Carlo sweeps and CSV output driving the
//!   `uca-somp` binary.

pub mod channel;
pub mod codebook;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod numerics;

pub use error::{Error, Result};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
