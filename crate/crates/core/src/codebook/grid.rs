use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{far_field_steering, near_field_steering, SystemConfig, UcaGeometry};
use crate::numerics::{first_j0_zero, solve_beta_delta};
use crate::{CMatrix, CVector, Error, Result};

/// Distance coordinate of a grid point. `FarField` is the `z = 0` ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RingDistance {
    FarField,
    Finite(f64),
}

impl RingDistance {
    pub fn meters(self) -> f64 {
        match self {
            RingDistance::FarField => f64::INFINITY,
            RingDistance::Finite(r) => r,
        }
    }
}

/// `(t, s, z)`: elevation, azimuth and distance-ring indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridIndex {
    pub t: usize,
    pub s: usize,
    pub z: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub distance: RingDistance,
    pub elevation_rad: f64,
    pub azimuth_rad: f64,
    pub indices: GridIndex,
}

/// Design constants of a Bessel-zero codebook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodebookParams {
    /// Distance-correlation threshold Delta.
    pub delta: f64,
    /// First zero of J0.
    pub alpha: f64,
    /// `J0(beta_delta) = delta`.
    pub beta_delta: f64,
    /// Ring scale `pi R^2 / (2 lambda beta_delta)`, metres.
    pub z_cap: f64,
    pub r_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Spherical,
    Polar,
    Angular,
}

/// An `N x G` dictionary with one grid point per column.
#[derive(Debug, Clone)]
pub struct SphericalCodebook {
    pub kind: CodebookKind,
    pub matrix: CMatrix,
    pub grid: Vec<GridPoint>,
    /// `None` for the angular (DFT) dictionary.
    pub params: Option<CodebookParams>,
}

impl SphericalCodebook {
    pub fn num_columns(&self) -> usize {
        self.grid.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `theta_t = asin(t lambda alpha / (2 pi R))`, `t = 0..=T`.
pub fn elevation_grid(radius: f64, lambda: f64, alpha: f64) -> Vec<f64> {
    let step = lambda * alpha / (TAU * radius);
    let count = (TAU * radius / (lambda * alpha)).floor() as usize;
    (0..=count).map(|t| (t as f64 * step).min(1.0).asin()).collect()
}

/// `phi_s = 2 s asin(lambda alpha / (4 pi R sin theta))`, `s = 0..=S` with
/// `S = floor(pi / asin(..))`, less one if `phi_S` would reach `2 pi`. A
/// single sample at 0 when the arcsine argument exceeds 1.
pub fn azimuth_grid(radius: f64, lambda: f64, alpha: f64, theta: f64) -> Result<Vec<f64>> {
    let sin_theta = theta.sin();
    if !(theta > 0.0 && sin_theta > 0.0) {
        return Err(Error::domain(format!(
            "azimuth grid needs a positive elevation, got {theta}"
        )));
    }
    let arg = lambda * alpha / (2.0 * TAU * radius * sin_theta);
    if arg > 1.0 {
        return Ok(vec![0.0]);
    }
    let half_step = arg.asin();
    let mut count = (PI / half_step).floor() as usize;
    // at t = 1 the argument is exactly 1/2 and the last sample would land on 2 pi
    if count as f64 * 2.0 * half_step >= TAU * (1.0 - 1e-12) {
        count -= 1;
    }
    Ok((0..=count).map(|s| s as f64 * 2.0 * half_step).collect())
}

/// Far-field ring followed by `r_z = Z sin^2(theta) / z` for `z = 1, 2, ..`
/// while `r_z >= r_min`.
pub fn distance_grid(theta: f64, z_cap: f64, r_min: f64) -> Vec<RingDistance> {
    let scale = z_cap * theta.sin().powi(2);
    let mut rings = vec![RingDistance::FarField];
    let mut z = 1usize;
    loop {
        let r = scale / z as f64;
        if !(r >= r_min) {
            break;
        }
        rings.push(RingDistance::Finite(r));
        z += 1;
    }
    rings
}

/// Smallest communication distance the ring construction supports,
/// `0.5 sqrt(D^3 / lambda)`.
pub fn min_admissible_distance(aperture: f64, lambda: f64) -> f64 {
    0.5 * (aperture.powi(3) / lambda).sqrt()
}

fn design_params(config: &SystemConfig, delta: f64, r_min: f64) -> Result<(UcaGeometry, CodebookParams)> {
    config.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!(
            "correlation threshold must lie in (0, 1), got {delta}"
        )));
    }
    let geom = config.geometry()?;
    let lambda = config.wavelength();
    let floor = min_admissible_distance(geom.aperture_m, lambda);
    if !(r_min > floor) {
        return Err(Error::config(format!(
            "r_min = {r_min} m is below the minimum admissible distance {floor:.6} m"
        )));
    }
    let beta_delta = solve_beta_delta(delta)?;
    let radius = geom.radius_m;
    let params = CodebookParams {
        delta,
        alpha: first_j0_zero(),
        beta_delta,
        z_cap: PI * radius * radius / (2.0 * lambda * beta_delta),
        r_min,
    };
    Ok((geom, params))
}

fn push_sweep(
    grid: &mut Vec<GridPoint>,
    t: usize,
    theta: f64,
    geom: &UcaGeometry,
    lambda: f64,
    params: &CodebookParams,
) -> Result<()> {
    let azimuths = azimuth_grid(geom.radius_m, lambda, params.alpha, theta)?;
    let rings = distance_grid(theta, params.z_cap, params.r_min);
    for (s, &phi) in azimuths.iter().enumerate() {
        for (z, &distance) in rings.iter().enumerate() {
            grid.push(GridPoint {
                distance,
                elevation_rad: theta,
                azimuth_rad: phi,
                indices: GridIndex { t, s, z },
            });
        }
    }
    Ok(())
}

/// Grid points of the spherical codebook in construction order
/// (elevation, then azimuth, then distance ring). The `theta = 0` sample
/// contributes only the constant far-field point.
pub fn spherical_grid(config: &SystemConfig, delta: f64, r_min: f64) -> Result<(Vec<GridPoint>, CodebookParams)> {
    let (geom, params) = design_params(config, delta, r_min)?;
    let lambda = config.wavelength();
    let mut grid = Vec::new();
    for (t, &theta) in elevation_grid(geom.radius_m, lambda, params.alpha).iter().enumerate() {
        if t == 0 {
            grid.push(GridPoint {
                distance: RingDistance::FarField,
                elevation_rad: 0.0,
                azimuth_rad: 0.0,
                indices: GridIndex { t: 0, s: 0, z: 0 },
            });
            continue;
        }
        push_sweep(&mut grid, t, theta, &geom, lambda, &params)?;
    }
    Ok((grid, params))
}

/// Polar baseline: the spherical construction restricted to the
/// `theta = pi/2` plane. All points carry `t = 0`.
pub fn polar_grid(config: &SystemConfig, delta: f64, r_min: f64) -> Result<(Vec<GridPoint>, CodebookParams)> {
    let (geom, params) = design_params(config, delta, r_min)?;
    let mut grid = Vec::new();
    push_sweep(&mut grid, 0, FRAC_PI_2, &geom, config.wavelength(), &params)?;
    Ok((grid, params))
}

fn steering_for(point: &GridPoint, geom: &UcaGeometry, lambda: f64) -> CVector {
    match point.distance {
        RingDistance::FarField => far_field_steering(point.elevation_rad, point.azimuth_rad, geom, lambda),
        RingDistance::Finite(r) => near_field_steering(r, point.elevation_rad, point.azimuth_rad, geom, lambda),
    }
}

/// Builds the `N x G` matrix for `grid`. Columns are independent, so
/// they are computed in parallel without affecting the result.
pub(crate) fn materialize(config: &SystemConfig, grid: &[GridPoint]) -> Result<CMatrix> {
    let geom = config.geometry()?;
    let lambda = config.wavelength();
    let columns: Vec<CVector> = grid
        .par_iter()
        .map(|p| steering_for(p, &geom, lambda))
        .collect();
    let mut matrix = CMatrix::zeros(geom.len(), grid.len());
    for (g, col) in columns.into_iter().enumerate() {
        matrix.set_column(g, &col);
    }
    Ok(matrix)
}

/// Spherical-domain dictionary over elevation, azimuth and distance.
pub fn build_spherical_codebook(config: &SystemConfig, delta: f64, r_min: f64) -> Result<SphericalCodebook> {
    let (grid, params) = spherical_grid(config, delta, r_min)?;
    Ok(SphericalCodebook {
        kind: CodebookKind::Spherical,
        matrix: materialize(config, &grid)?,
        grid,
        params: Some(params),
    })
}

/// Polar-domain baseline dictionary (distance and azimuth at `theta = pi/2`).
pub fn build_polar_codebook(config: &SystemConfig, delta: f64, r_min: f64) -> Result<SphericalCodebook> {
    let (grid, params) = polar_grid(config, delta, r_min)?;
    Ok(SphericalCodebook {
        kind: CodebookKind::Polar,
        matrix: materialize(config, &grid)?,
        grid,
        params: Some(params),
    })
}

/// Unitary DFT over the antenna index, `W[n, g] = exp(-j 2 pi n g / N) / sqrt(N)`.
pub fn build_angular_codebook(config: &SystemConfig) -> Result<SphericalCodebook> {
    config.validate()?;
    let n = config.num_antennas;
    let scale = 1.0 / (n as f64).sqrt();
    let matrix = CMatrix::from_fn(n, n, |row, col| {
        // reduce n*g mod N first so the phase stays small and exact
        let k = (row * col) % n;
        Complex64::from_polar(scale, -TAU * k as f64 / n as f64)
    });
    let grid = (0..n)
        .map(|g| GridPoint {
            distance: RingDistance::FarField,
            elevation_rad: FRAC_PI_2,
            azimuth_rad: TAU * g as f64 / n as f64,
            indices: GridIndex { t: 0, s: g, z: 0 },
        })
        .collect();
    Ok(SphericalCodebook {
        kind: CodebookKind::Angular,
        matrix,
        grid,
        params: None,
    })
}
