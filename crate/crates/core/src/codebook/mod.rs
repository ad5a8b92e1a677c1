//! Dictionaries for sparse channel recovery.
//!
//! The spherical-domain codebook samples elevation, azimuth and distance
//! so that neighbouring steering vectors sit near a zero of J0 (angles)
//! or at a fixed correlation threshold (distance). Polar and angular
//! dictionaries serve as baselines.

mod coherence;
mod export;
mod grid;

pub use coherence::{coherence_stats, column_correlation, CoherenceReport, PairStats};
pub use export::{read_binary, write_binary, write_metadata, BINARY_MAGIC, BINARY_VERSION};
pub use grid::{
    azimuth_grid, build_angular_codebook, build_polar_codebook, build_spherical_codebook,
    distance_grid, elevation_grid, min_admissible_distance, polar_grid, spherical_grid,
    CodebookKind, CodebookParams, GridIndex, GridPoint, RingDistance, SphericalCodebook,
};
