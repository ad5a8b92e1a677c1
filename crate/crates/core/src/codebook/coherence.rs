use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{GridIndex, SphericalCodebook};
use crate::{CVector, Error, Result};

/// `|b1^H b2|`.
pub fn column_correlation(b1: &CVector, b2: &CVector) -> Result<f64> {
    if b1.len() != b2.len() {
        return Err(Error::domain(format!(
            "correlation of vectors with lengths {} and {}",
            b1.len(),
            b2.len()
        )));
    }
    Ok(b1.dotc(b2).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
}

impl PairStats {
    fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        values.sort_by(f64::total_cmp);
        let quantile = |q: f64| values[((count - 1) as f64 * q).round() as usize];
        Some(PairStats {
            count,
            max: values[count - 1],
            mean,
            median: quantile(0.5),
            p95: quantile(0.95),
        })
    }
}

/// Correlation summaries of a codebook. `None` means no pair of that kind.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    /// `(t, 0, z)` against `(t + 1, 0, z)`; only `s = 0` (`phi = 0`) is
    /// shared by every elevation's azimuth grid.
    pub elevation: Option<PairStats>,
    /// `(t, s, z)` against `(t, s + 1, z)`.
    pub azimuth: Option<PairStats>,
    /// `(t, s, z)` against `(t, s, z + 1)`.
    pub distance: Option<PairStats>,
    /// Uniformly drawn distinct column pairs.
    pub sampled: Option<PairStats>,
}

fn correlations(cb: &SphericalCodebook, pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs
        .par_iter()
        .map(|&(i, j)| cb.matrix.column(i).dotc(&cb.matrix.column(j)).norm())
        .collect()
}

/// Adjacent-grid and randomly sampled column correlations.
///
/// Up to `sample_budget` random pairs are drawn from a stream seeded by
/// `seed`; the result is deterministic.
pub fn coherence_stats(cb: &SphericalCodebook, sample_budget: usize, seed: u64) -> CoherenceReport {
    let index: HashMap<GridIndex, usize> = cb
        .grid
        .iter()
        .enumerate()
        .map(|(col, p)| (p.indices, col))
        .collect();

    let mut elevation = Vec::new();
    let mut azimuth = Vec::new();
    let mut distance = Vec::new();
    for (col, p) in cb.grid.iter().enumerate() {
        let GridIndex { t, s, z } = p.indices;
        if s == 0 {
            if let Some(&next) = index.get(&GridIndex { t: t + 1, s: 0, z }) {
                elevation.push((col, next));
            }
        }
        if let Some(&next) = index.get(&GridIndex { t, s: s + 1, z }) {
            azimuth.push((col, next));
        }
        if let Some(&next) = index.get(&GridIndex { t, s, z: z + 1 }) {
            distance.push((col, next));
        }
    }

    let g = cb.num_columns();
    let mut sampled = Vec::new();
    if g >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..sample_budget {
            let i = rng.random_range(0..g);
            let mut j = rng.random_range(0..g - 1);
            if j >= i {
                j += 1;
            }
            sampled.push((i, j));
        }
    }

    CoherenceReport {
        elevation: PairStats::from_values(correlations(cb, &elevation)),
        azimuth: PairStats::from_values(correlations(cb, &azimuth)),
        distance: PairStats::from_values(correlations(cb, &distance)),
        sampled: PairStats::from_values(correlations(cb, &sampled)),
    }
}
