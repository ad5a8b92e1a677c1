use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::{Error, Result};

/// Absolute bracket width at which bisection stops.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Above this argument the Hankel asymptotic expansion replaces the
/// power series, whose alternating terms cancel catastrophically.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
///
/// Even in `x`, so negative arguments are folded onto `|x|`. Absolute
/// error stays below 1e-10 on `[0, 50]` and shrinks beyond.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("J0 argument must be finite, got {x}")));
    }
    let x = x.abs();
    if x <= SERIES_LIMIT {
        Ok(j0_series(x))
    } else {
        Ok(j0_asymptotic(x))
    }
}

fn j0_series(x: f64) -> f64 {
    // sum_k (-1)^k (x^2/4)^k / (k!)^2
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= -q / (k * k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-3) && k > 0.5 * x {
            break;
        }
        k += 1.0;
    }
    sum
}

fn j0_asymptotic(x: f64) -> f64 {
    // Hankel expansion: J0 = sqrt(2/(pi x)) (P cos w - Q sin w), w = x - pi/4,
    // with a_k = a_{k-1} * (-(2k-1)^2) / (8k), truncated at the smallest term.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * (-odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= last || next.abs() < 1e-18 {
            break;
        }
        last = next.abs();
        term = next;
        // term is a_k / x^k; P collects even k with sign (-1)^(k/2),
        // Q odd k with sign (-1)^((k-1)/2).
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
    }
    let w = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

/// Bisection for `f(x) = target` where `f` is decreasing on `[lo, hi]`.
pub fn bisect_decreasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive zero j_{0,1} of J0, bracketed in (2, 3).
pub fn first_j0_zero() -> f64 {
    static ALPHA: OnceLock<f64> = OnceLock::new();
    *ALPHA.get_or_init(|| bisect_decreasing(j0_series, 0.0, 2.0, 3.0, ROOT_TOLERANCE))
}

/// The unique `beta` in `[0, j_{0,1}]` with `J0(beta) = delta`.
///
/// J0 decreases monotonically from 1 to 0 on that interval, so the
/// inverse exists for every `delta` in `[0, 1]`.
pub fn solve_beta_delta(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain(format!(
            "correlation threshold must lie in [0, 1], got {delta}"
        )));
    }
    if delta == 1.0 {
        return Ok(0.0);
    }
    let alpha = first_j0_zero();
    if delta == 0.0 {
        return Ok(alpha);
    }
    Ok(bisect_decreasing(j0_series, delta, 0.0, alpha, ROOT_TOLERANCE))
}
