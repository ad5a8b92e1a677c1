use super::measurement::CombiningMatrix;
use crate::channel::{near_field_steering, PathParams, SystemConfig};
use crate::numerics::least_squares_solve;
use crate::{CMatrix, Error, Result};

/// Minimum-norm minimizer of `||Y - A H||_F`.
pub fn ls_estimate(y: &CMatrix, a: &CombiningMatrix) -> Result<CMatrix> {
    Ok(least_squares_solve(&a.entries, y)?.solution)
}

#[derive(Debug, Clone)]
pub struct OracleEstimate {
    pub estimate: CMatrix,
    /// `A B` was numerically rank deficient; the estimate is minimum norm.
    pub rank_deficient: bool,
}

/// Genie-aided estimate: least squares on the exact steering vectors of
/// the true paths, then reconstruction through them.
pub fn oracle_estimate(y: &CMatrix, a: &CombiningMatrix, paths: &[PathParams], config: &SystemConfig) -> Result<OracleEstimate> {
    if paths.is_empty() {
        return Err(Error::domain("oracle needs at least one true path"));
    }
    let geom = config.geometry()?;
    let lambda = config.wavelength();
    let atoms: Vec<_> = paths
        .iter()
        .map(|p| near_field_steering(p.distance_m, p.elevation_rad, p.azimuth_rad, &geom, lambda))
        .collect();
    let b = CMatrix::from_columns(&atoms);
    let ls = least_squares_solve(&(&a.entries * &b), y)?;
    if ls.rank_deficient {
        log::warn!("oracle dictionary is rank deficient ({} of {} atoms)", ls.rank, paths.len());
    }
    Ok(OracleEstimate {
        estimate: &b * &ls.solution,
        rank_deficient: ls.rank_deficient,
    })
}

/// `||H - H_hat||_F^2 / ||H||_F^2` for one realization.
pub fn nmse(h: &CMatrix, h_hat: &CMatrix) -> Result<f64> {
    if h.shape() != h_hat.shape() {
        return Err(Error::dimension(format!(
            "truth is {:?}, estimate is {:?}",
            h.shape(),
            h_hat.shape()
        )));
    }
    let energy = h.norm_squared();
    if energy == 0.0 {
        return Err(Error::domain("NMSE is undefined for an all-zero channel"));
    }
    Ok((h - h_hat).norm_squared() / energy)
}

pub fn nmse_db(h: &CMatrix, h_hat: &CMatrix) -> Result<f64> {
    Ok(10.0 * nmse(h, h_hat)?.log10())
}
