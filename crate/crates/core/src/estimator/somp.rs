use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;

use super::measurement::{CombiningMatrix, MeasurementSet};
use super::baselines::nmse_db;
use crate::channel::ChannelMatrix;
use crate::codebook::SphericalCodebook;
use crate::numerics::least_squares_solve;
use crate::{CMatrix, Error, Result};

/// Columns of `A W` computed per block; bounds the temporary held by each
/// worker for large codebooks.
const PRODUCT_BLOCK: usize = 512;

/// Sensing dictionary `A W`, computed once per combiner/codebook pair.
#[derive(Debug, Clone)]
pub struct Dictionary {
    pub product: CMatrix,
}

impl Dictionary {
    pub fn new(a: &CombiningMatrix, w: &SphericalCodebook) -> Result<Self> {
        Self::from_matrices(&a.entries, &w.matrix)
    }

    pub fn from_matrices(a: &CMatrix, w: &CMatrix) -> Result<Self> {
        if a.ncols() != w.nrows() {
            return Err(Error::dimension(format!(
                "combiner has {} columns, codebook has {} rows",
                a.ncols(),
                w.nrows()
            )));
        }
        let (q, g) = (a.nrows(), w.ncols());
        let mut product = CMatrix::zeros(q, g);
        product
            .as_mut_slice()
            .par_chunks_mut(q * PRODUCT_BLOCK)
            .enumerate()
            .for_each(|(b, out)| {
                let start = b * PRODUCT_BLOCK;
                let width = out.len() / q;
                let block = a * w.columns(start, width);
                out.copy_from_slice(block.as_slice());
            });
        Ok(Dictionary { product })
    }

    pub fn num_atoms(&self) -> usize {
        self.product.ncols()
    }

    /// `sum_m |(D^H R)(p, m)|^2` for every atom `p`.
    fn correlation_energy(&self, residual: &CMatrix) -> Vec<f64> {
        let q = self.product.nrows();
        self.product
            .as_slice()
            .par_chunks(q)
            .map(|atom| {
                residual
                    .column_iter()
                    .map(|r| {
                        atom.iter()
                            .zip(r.iter())
                            .fold(Complex64::new(0.0, 0.0), |acc, (d, v)| acc + d.conj() * v)
                            .norm_sqr()
                    })
                    .sum()
            })
            .collect()
    }

    fn select(&self, support: &[usize]) -> CMatrix {
        CMatrix::from_columns(&support.iter().map(|&p| self.product.column(p)).collect::<Vec<_>>())
    }
}

/// Output of a greedy sparse recovery run.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    /// Selected atoms in selection order.
    pub support: Vec<usize>,
    /// Coefficients on `support`, `|support| x M`.
    pub sparse_coeffs: CMatrix,
    /// `W[:, support] * sparse_coeffs`, `N x M`.
    pub channel_estimate: CMatrix,
    /// `||Y - D_support X||_F` after each iteration.
    pub residual_norms: Vec<f64>,
    /// Atoms skipped because they made the support ill-conditioned.
    pub warnings: Vec<String>,
    /// Filled in by [`EstimationResult::with_truth`].
    pub nmse_db: Option<f64>,
}

impl EstimationResult {
    pub fn with_truth(mut self, h: &ChannelMatrix) -> Result<Self> {
        self.nmse_db = Some(nmse_db(&h.entries, &self.channel_estimate)?);
        Ok(self)
    }
}

/// S-SOMP: simultaneous OMP over the subcarriers with a shared support.
pub fn s_somp(y: &MeasurementSet, a: &CombiningMatrix, w: &SphericalCodebook, l_hat: usize) -> Result<EstimationResult> {
    let dict = Dictionary::new(a, w)?;
    s_somp_with_dictionary(&y.observations, &dict, w, l_hat)
}

/// S-SOMP against a precomputed `A W`.
///
/// Each iteration picks the atom with the largest correlation energy
/// with the residual (ties go to the lowest index), re-fits all selected
/// atoms to `Y` by least squares and recomputes `R = Y - D_support X`.
/// An atom that leaves the support numerically rank deficient is
/// skipped in favour of the next-best one.
pub fn s_somp_with_dictionary(y: &CMatrix, dict: &Dictionary, w: &SphericalCodebook, l_hat: usize) -> Result<EstimationResult> {
    let (q, g) = dict.product.shape();
    if w.num_columns() != g {
        return Err(Error::dimension(format!(
            "dictionary has {g} atoms, codebook has {}",
            w.num_columns()
        )));
    }
    if y.nrows() != q {
        return Err(Error::dimension(format!(
            "measurements have {} rows, dictionary has {q}",
            y.nrows()
        )));
    }
    if l_hat == 0 || l_hat > q || l_hat > g {
        return Err(Error::domain(format!(
            "iteration count {l_hat} must lie in [1, min({q} measurements, {g} atoms)]"
        )));
    }

    let mut support: Vec<usize> = Vec::with_capacity(l_hat);
    let mut excluded: HashSet<usize> = HashSet::new();
    let mut warnings = Vec::new();
    let mut residual = y.clone();
    let mut residual_norms = Vec::with_capacity(l_hat);
    let mut coeffs = CMatrix::zeros(0, y.ncols());

    for _ in 0..l_hat {
        let energy = dict.correlation_energy(&residual);
        loop {
            let best = energy
                .iter()
                .enumerate()
                .filter(|(p, _)| !excluded.contains(p))
                .fold(None, |best: Option<(usize, f64)>, (p, &e)| match best {
                    Some((_, be)) if be >= e => best,
                    _ => Some((p, e)),
                });
            let Some((p, _)) = best else {
                return Err(Error::Numerical(
                    "every remaining atom makes the support rank deficient".into(),
                ));
            };
            excluded.insert(p);
            support.push(p);
            let sub = dict.select(&support);
            let ls = least_squares_solve(&sub, y)?;
            if ls.rank_deficient {
                support.pop();
                let msg = format!(
                    "skipped atom {p}: support condition estimate {:.3e}",
                    ls.condition_estimate
                );
                log::warn!("{msg}");
                warnings.push(msg);
                continue;
            }
            residual = y - &sub * &ls.solution;
            coeffs = ls.solution;
            break;
        }
        residual_norms.push(residual.norm());
    }

    let atoms = CMatrix::from_columns(&support.iter().map(|&p| w.matrix.column(p)).collect::<Vec<_>>());
    let channel_estimate = &atoms * &coeffs;
    Ok(EstimationResult {
        support,
        sparse_coeffs: coeffs,
        channel_estimate,
        residual_norms,
        warnings,
        nmse_db: None,
    })
}
