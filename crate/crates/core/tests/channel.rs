use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uca_somp::channel::{
    approx_distance, exact_distance, generate_channel, near_field_steering, sample_paths,
    subcarrier_frequencies, PathParams, SystemConfig, UcaGeometry, UserRanges,
};
use uca_somp::{Complex64, SPEED_OF_LIGHT};

fn config(n: usize, m: usize) -> SystemConfig {
    SystemConfig {
        carrier_freq_hz: 30e9,
        bandwidth_hz: 100e6,
        num_subcarriers: m,
        num_antennas: n,
        antenna_spacing_m: 0.005,
        num_rf_chains: 4,
        num_pilot_slots: 16,
    }
}

#[test]
fn adjacent_antennas_sit_one_spacing_apart() {
    for n in [8, 64, 128, 512] {
        let geom = config(n, 1).geometry().unwrap();
        let p0 = geom.position(0);
        let p1 = geom.position(1);
        let chord = ((p0[0] - p1[0]).powi(2) + (p0[1] - p1[1]).powi(2) + (p0[2] - p1[2]).powi(2)).sqrt();
        assert!((chord - 0.005).abs() < 1e-12, "N = {n}");
    }
}

#[test]
fn exact_distance_matches_cartesian_and_triangle_inequality() {
    let geom = config(128, 1).geometry().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let r = rng.random_range(0.2..50.0);
        let theta = rng.random_range(0.0..PI);
        let phi = rng.random_range(0.0..TAU);
        let n = rng.random_range(0..128);
        let user = [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()];
        let ant = geom.position(n);
        let want = ((user[0] - ant[0]).powi(2) + (user[1] - ant[1]).powi(2) + (user[2] - ant[2]).powi(2)).sqrt();
        let got = exact_distance(r, theta, phi, n, &geom);
        assert!((got - want).abs() < 1e-10 * r.max(1.0));
        assert!((got - r).abs() <= geom.radius_m + 1e-12);
    }
}

#[test]
fn taylor_error_shrinks_with_distance() {
    let geom = config(128, 1).geometry().unwrap();
    let (theta, phi) = (1.1, 0.4);
    let errors: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 10.0, 50.0]
        .iter()
        .map(|&r| {
            (0..128)
                .map(|n| (exact_distance(r, theta, phi, n, &geom) - approx_distance(r, theta, phi, n, &geom)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn channel_is_linear_in_gains() {
    let cfg = config(64, 4);
    let mut paths = sample_paths(9, 2, &UserRanges::paper()).unwrap();
    let h = generate_channel(&paths, &cfg).unwrap();
    let s = Complex64::new(0.3, -1.7);
    for p in &mut paths {
        p.gain *= s;
    }
    let scaled = generate_channel(&paths, &cfg).unwrap();
    assert!((&scaled.entries - &h.entries * s).norm() < 1e-12 * h.entries.norm());
}

#[test]
fn channel_matches_naive_loop() {
    let cfg = config(64, 4);
    let geom = UcaGeometry::new(cfg.radius().unwrap(), 64).unwrap();
    let paths = vec![
        PathParams {
            distance_m: 3.0,
            elevation_rad: 0.7,
            azimuth_rad: 5.9,
            gain: Complex64::new(0.8, 0.1),
        },
        PathParams {
            distance_m: 11.5,
            elevation_rad: 1.4,
            azimuth_rad: 0.3,
            gain: Complex64::new(-0.2, 1.1),
        },
    ];
    let h = generate_channel(&paths, &cfg).unwrap();
    let lambda = SPEED_OF_LIGHT / 30e9;
    let freqs: Vec<f64> = (1..=4)
        .map(|m| 30e9 + (2.0 * m as f64 - 4.0) * 100e6 / 8.0)
        .collect();
    assert_eq!(freqs, subcarrier_frequencies(&cfg));
    for (m, f) in freqs.iter().enumerate() {
        for n in 0..64 {
            let mut want = Complex64::new(0.0, 0.0);
            for p in &paths {
                let rn = exact_distance(p.distance_m, p.elevation_rad, p.azimuth_rad, n, &geom);
                let phase = -TAU * f * p.distance_m / SPEED_OF_LIGHT - TAU / lambda * (rn - p.distance_m);
                want += p.gain * (64.0f64 / 2.0).sqrt() / 8.0 * Complex64::from_polar(1.0, phase);
            }
            assert!((h.entries[(n, m)] - want).norm() < 1e-10, "n {n} m {m}");
        }
    }
}

#[test]
fn steering_vectors_have_unit_norm() {
    let cfg = config(512, 1);
    let geom = cfg.geometry().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let b = near_field_steering(
            rng.random_range(4.0..100.0),
            rng.random_range(0.0..PI / 2.0),
            rng.random_range(0.0..TAU),
            &geom,
            cfg.wavelength(),
        );
        assert!((b.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sampled_paths_stay_in_range() {
    let ranges = UserRanges::paper();
    let paths = sample_paths(123, 500, &ranges).unwrap();
    assert_eq!(paths, sample_paths(123, 500, &ranges).unwrap());
    for p in &paths {
        assert!(p.distance_m >= ranges.distance_m.0 && p.distance_m < ranges.distance_m.1);
        assert!(p.elevation_rad > 0.0 && p.elevation_rad < ranges.elevation_rad.1);
        assert!((0.0..TAU).contains(&p.azimuth_rad));
    }
}
