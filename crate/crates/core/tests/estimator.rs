use uca_somp::channel::{generate_channel, sample_paths, PathParams, SystemConfig, UserRanges};
use uca_somp::codebook::{build_spherical_codebook, RingDistance, SphericalCodebook};
use uca_somp::estimator::{
    generate_combining, ls_estimate, nmse, oracle_estimate, s_somp, synthesize_measurements,
    CombiningMatrix, Dictionary,
};
use uca_somp::numerics::least_squares_solve;
use uca_somp::{CMatrix, Complex64};

fn config(pilots: usize) -> SystemConfig {
    SystemConfig {
        carrier_freq_hz: 30e9,
        bandwidth_hz: 100e6,
        num_subcarriers: 8,
        num_antennas: 128,
        antenna_spacing_m: 0.005,
        num_rf_chains: 4,
        num_pilot_slots: pilots,
    }
}

fn setup(pilots: usize) -> (SystemConfig, CombiningMatrix, SphericalCodebook) {
    let cfg = config(pilots);
    let a = generate_combining(21, pilots, 4, 128).unwrap();
    let cb = build_spherical_codebook(&cfg, 0.55, 0.5).unwrap();
    (cfg, a, cb)
}

fn planted(cb: &SphericalCodebook, g: usize, gain: Complex64) -> PathParams {
    let p = &cb.grid[g];
    let RingDistance::Finite(r) = p.distance else {
        panic!("column {g} is far field");
    };
    PathParams {
        distance_m: r,
        elevation_rad: p.elevation_rad,
        azimuth_rad: p.azimuth_rad,
        gain,
    }
}

/// Finite-distance columns away from the azimuth seam, where the last
/// sample of a ring nearly coincides with the first.
fn finite_columns(cb: &SphericalCodebook) -> Vec<usize> {
    (0..cb.num_columns())
        .filter(|&g| matches!(cb.grid[g].distance, RingDistance::Finite(_)))
        .filter(|&g| (0.3..6.0).contains(&cb.grid[g].azimuth_rad))
        .collect()
}

#[test]
fn combining_statistics() {
    let (n, q) = (64, 32);
    let mut gram = CMatrix::zeros(n, n);
    let draws = 400;
    for seed in 0..draws {
        let a = generate_combining(seed, 8, 4, n).unwrap();
        for col in a.entries.column_iter() {
            assert!((col.norm_squared() - q as f64 / n as f64).abs() < 1e-12);
        }
        gram += a.entries.adjoint() * &a.entries;
    }
    gram /= Complex64::new(draws as f64, 0.0);
    let expected = q as f64 / n as f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { expected } else { 0.0 };
            assert!((gram[(i, j)] - want).norm() < 0.05, "({i}, {j}) {}", gram[(i, j)]);
        }
    }
}

#[test]
fn column_norms_concentrate() {
    let target = (128.0f64 / 256.0).sqrt();
    let mut total = 0.0;
    for seed in 0..20 {
        let a = generate_combining(seed, 32, 4, 256).unwrap();
        total += a.entries.column_iter().map(|c| c.norm()).sum::<f64>() / 256.0;
    }
    assert!((total / 20.0 - target).abs() < 0.05 * target);
}

#[test]
fn noiseless_measurements_are_linear() {
    let (cfg, a, _) = setup(8);
    let h1 = generate_channel(&sample_paths(1, 2, &UserRanges::paper()).unwrap(), &cfg).unwrap();
    let mut h2 = generate_channel(&sample_paths(2, 3, &UserRanges::paper()).unwrap(), &cfg).unwrap();
    let y1 = synthesize_measurements(&h1, &a, f64::INFINITY, 0).unwrap();
    let y2 = synthesize_measurements(&h2, &a, f64::INFINITY, 0).unwrap();
    let s = Complex64::new(-0.5, 2.0);
    h2.entries = &h1.entries + &h2.entries * s;
    let y = synthesize_measurements(&h2, &a, f64::INFINITY, 0).unwrap();
    assert_eq!(y.noise_variance, 0.0);
    assert!((&y.observations - (&y1.observations + &y2.observations * s)).norm() < 1e-12 * y.observations.norm());
}

#[test]
fn noise_matches_target_snr() {
    let (cfg, a, _) = setup(8);
    let h = generate_channel(&sample_paths(3, 3, &UserRanges::paper()).unwrap(), &cfg).unwrap();
    let clean = &a.entries * &h.entries;
    for snr_db in [0.0, 10.0, 20.0] {
        let draws = 1000;
        let energy: f64 = (0..draws)
            .map(|s| (synthesize_measurements(&h, &a, snr_db, s).unwrap().observations - &clean).norm_squared())
            .sum::<f64>()
            / draws as f64;
        let ratio = h.frobenius_norm_sqr() / energy / 10f64.powf(snr_db / 10.0);
        assert!((ratio - 1.0).abs() < 0.05, "{snr_db} dB: {ratio}");
    }
}

#[test]
fn zero_measurements_give_zero_estimate() {
    let (_, _, cb) = setup(8);
    let a = generate_combining(1, 8, 4, 128).unwrap();
    let dict = Dictionary::new(&a, &cb).unwrap();
    let y = CMatrix::zeros(32, 8);
    let est = uca_somp::estimator::s_somp_with_dictionary(&y, &dict, &cb, 2).unwrap();
    assert_eq!(est.support, vec![0, 1]);
    assert_eq!(est.channel_estimate.norm(), 0.0);
    assert_eq!(est.sparse_coeffs.norm(), 0.0);
    assert!(est.residual_norms.iter().all(|&r| r == 0.0));
    assert_eq!(ls_estimate(&y, &a).unwrap().norm(), 0.0);
}

#[test]
fn single_on_grid_path_is_recovered_exactly() {
    let (cfg, a, cb) = setup(16);
    let cols = finite_columns(&cb);
    for &g in cols.iter().step_by(cols.len() / 7) {
        let h = generate_channel(&[planted(&cb, g, Complex64::new(0.6, -0.9))], &cfg).unwrap();
        let y = synthesize_measurements(&h, &a, f64::INFINITY, 0).unwrap();
        let est = s_somp(&y, &a, &cb, 1).unwrap();
        assert_eq!(est.support, vec![g]);
        assert!(nmse(&h.entries, &est.channel_estimate).unwrap() < 1e-10);
    }
}

#[test]
fn two_separated_paths_are_recovered() {
    let (cfg, a, cb) = setup(16);
    let cols = finite_columns(&cb);
    let (g1, g2) = (cols[cols.len() / 5], cols[4 * cols.len() / 5]);
    let paths = [planted(&cb, g1, Complex64::new(1.0, 0.2)), planted(&cb, g2, Complex64::new(-0.4, 0.8))];
    let h = generate_channel(&paths, &cfg).unwrap();
    let y = synthesize_measurements(&h, &a, f64::INFINITY, 0).unwrap();
    let est = s_somp(&y, &a, &cb, 2).unwrap();
    let mut support = est.support.clone();
    support.sort();
    assert_eq!(support, vec![g1, g2]);
    assert!(nmse(&h.entries, &est.channel_estimate).unwrap() < 1e-10);
}

#[test]
fn residual_decreases_and_is_orthogonal_to_support() {
    let (cfg, a, cb) = setup(8);
    let dict = Dictionary::new(&a, &cb).unwrap();
    for seed in 0..10 {
        let h = generate_channel(&sample_paths(seed, 3, &UserRanges::paper()).unwrap(), &cfg).unwrap();
        let y = synthesize_measurements(&h, &a, 5.0, seed + 40).unwrap();
        let est = s_somp(&y, &a, &cb, 8).unwrap();
        assert!(est.residual_norms.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        let mut unique = est.support.clone();
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 8);
        assert!(*est.residual_norms.last().unwrap() <= y.observations.norm());

        let d = CMatrix::from_columns(&est.support.iter().map(|&p| dict.product.column(p)).collect::<Vec<_>>());
        let r = &y.observations - &d * &est.sparse_coeffs;
        assert!((d.adjoint() * &r).norm() < 1e-9 * y.observations.norm());
        let refit = least_squares_solve(&d, &y.observations).unwrap().solution;
        assert!((&refit - &est.sparse_coeffs).norm() < 1e-12 * est.sparse_coeffs.norm());
        assert!((r.norm() - est.residual_norms.last().unwrap()).abs() < 1e-9 * y.observations.norm());

        let w = CMatrix::from_columns(&est.support.iter().map(|&p| cb.matrix.column(p)).collect::<Vec<_>>());
        assert!((&w * &est.sparse_coeffs - &est.channel_estimate).norm() < 1e-12 * est.channel_estimate.norm());
    }
}

#[test]
fn invalid_iteration_counts_are_rejected() {
    let (cfg, a, cb) = setup(8);
    let h = generate_channel(&sample_paths(0, 1, &UserRanges::paper()).unwrap(), &cfg).unwrap();
    let y = synthesize_measurements(&h, &a, 10.0, 0).unwrap();
    assert!(s_somp(&y, &a, &cb, 0).is_err());
    assert!(s_somp(&y, &a, &cb, 33).is_err());
}

#[test]
fn ls_is_exact_with_full_measurements() {
    let (cfg, a, _) = setup(40);
    let h = generate_channel(&sample_paths(5, 3, &UserRanges::paper()).unwrap(), &cfg).unwrap();
    let y = synthesize_measurements(&h, &a, f64::INFINITY, 0).unwrap();
    let est = ls_estimate(&y.observations, &a).unwrap();
    assert!(nmse(&h.entries, &est).unwrap() < 1e-18);

    // underdetermined: consistent with the measurements
    let (_, a8, _) = setup(8);
    let y8 = synthesize_measurements(&h, &a8, f64::INFINITY, 0).unwrap();
    let est8 = ls_estimate(&y8.observations, &a8).unwrap();
    assert!((&a8.entries * &est8 - &y8.observations).norm() < 1e-10 * y8.observations.norm());
}

#[test]
fn oracle_is_exact_without_noise_and_beats_somp() {
    let (cfg, a, cb) = setup(8);
    let mut oracle_total = 0.0;
    let mut somp_total = 0.0;
    for seed in 0..20 {
        let paths = sample_paths(seed, 3, &UserRanges::paper()).unwrap();
        let h = generate_channel(&paths, &cfg).unwrap();
        let clean = synthesize_measurements(&h, &a, f64::INFINITY, 0).unwrap();
        let exact = oracle_estimate(&clean.observations, &a, &paths, &cfg).unwrap();
        assert!(!exact.rank_deficient);
        assert!(nmse(&h.entries, &exact.estimate).unwrap() < 1e-18);
        let zero = oracle_estimate(&CMatrix::zeros(32, 8), &a, &paths, &cfg).unwrap();
        assert_eq!(zero.estimate.norm(), 0.0);

        let noisy = synthesize_measurements(&h, &a, 10.0, 900 + seed).unwrap();
        oracle_total += nmse(&h.entries, &oracle_estimate(&noisy.observations, &a, &paths, &cfg).unwrap().estimate).unwrap();
        somp_total += nmse(&h.entries, &s_somp(&noisy, &a, &cb, 3).unwrap().channel_estimate).unwrap();
    }
    assert!(oracle_total <= somp_total);
}
