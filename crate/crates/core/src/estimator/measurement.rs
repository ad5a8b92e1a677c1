use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{complex_normal, ChannelMatrix};
use crate::{CMatrix, Error, Result};

/// Stacked analog combiner `A = [A_1; ..; A_P]`, each block `N_RF x N`
/// with constant-modulus entries `1/sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombiningMatrix {
    pub entries: CMatrix,
    pub num_slots: usize,
    pub num_rf_chains: usize,
}

impl CombiningMatrix {
    /// Block `A_p` for pilot slot `p` (zero based).
    pub fn slot(&self, p: usize) -> CMatrix {
        self.entries
            .rows(p * self.num_rf_chains, self.num_rf_chains)
            .into_owned()
    }

    pub fn num_antennas(&self) -> usize {
        self.entries.ncols()
    }
}

/// Random phases, i.i.d. uniform on `[0, 2 pi)`.
pub fn generate_combining(seed: u64, num_slots: usize, num_rf_chains: usize, num_antennas: usize) -> Result<CombiningMatrix> {
    if num_slots == 0 || num_rf_chains == 0 || num_antennas == 0 {
        return Err(Error::domain("combining dimensions must all be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modulus = 1.0 / (num_antennas as f64).sqrt();
    let rows = num_slots * num_rf_chains;
    // draw row-major so each slot block consumes a contiguous stretch of the stream
    let phases: Vec<f64> = (0..rows * num_antennas)
        .map(|_| rng.random_range(0.0..TAU))
        .collect();
    let entries = CMatrix::from_row_iterator(
        rows,
        num_antennas,
        phases.into_iter().map(|w| Complex64::from_polar(modulus, w)),
    );
    Ok(CombiningMatrix {
        entries,
        num_slots,
        num_rf_chains,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    /// `Y`, `P N_RF x M`.
    pub observations: CMatrix,
    pub noise_variance: f64,
    pub snr_db: f64,
    pub seed: u64,
}

/// `Y = A H + N`.
///
/// The noise variance is calibrated on this realization so that
/// `||H||_F^2 / E||N||_F^2` equals the target SNR:
/// `sigma^2 = ||H||_F^2 / (P N_RF M 10^(snr/10))`. `snr_db = +inf` gives a
/// noiseless measurement.
pub fn synthesize_measurements(h: &ChannelMatrix, a: &CombiningMatrix, snr_db: f64, seed: u64) -> Result<MeasurementSet> {
    if a.entries.ncols() != h.entries.nrows() {
        return Err(Error::dimension(format!(
            "combiner has {} columns, channel has {} antennas",
            a.entries.ncols(),
            h.entries.nrows()
        )));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::domain(format!("SNR must be a number above -inf dB, got {snr_db}")));
    }
    let mut observations = &a.entries * &h.entries;
    let energy = h.frobenius_norm_sqr();
    let noise_variance = if snr_db == f64::INFINITY || energy == 0.0 {
        0.0
    } else {
        let cells = (observations.nrows() * observations.ncols()) as f64;
        energy / (cells * 10f64.powf(snr_db / 10.0))
    };
    if noise_variance > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = noise_variance.sqrt();
        for v in observations.iter_mut() {
            *v += complex_normal(&mut rng) * sigma;
        }
    }
    Ok(MeasurementSet {
        observations,
        noise_variance,
        snr_db,
        seed,
    })
}
