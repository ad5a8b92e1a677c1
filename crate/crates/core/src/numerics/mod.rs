//! Special functions and dense linear-algebra kernels shared by the
//! channel, codebook and estimator modules.

mod bessel;
mod lstsq;

pub use bessel::{bessel_j0, bisect_decreasing, first_j0_zero, solve_beta_delta, ROOT_TOLERANCE};
pub use lstsq::{least_squares_solve, LeastSquares, RANK_CONDITION_LIMIT};
