//! UCA geometry, spherical-wave steering vectors and OFDM multipath
//! channel synthesis.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, CVector, Error, Result, SPEED_OF_LIGHT};

/// Carrier, bandwidth, array and pilot parameters of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub num_subcarriers: usize,
    pub num_antennas: usize,
    pub antenna_spacing_m: f64,
    pub num_rf_chains: usize,
    pub num_pilot_slots: usize,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_antennas < 3 {
            return Err(Error::config(format!(
                "a circular array needs at least 3 antennas, got {}",
                self.num_antennas
            )));
        }
        if self.num_subcarriers == 0 || self.num_rf_chains == 0 || self.num_pilot_slots == 0 {
            return Err(Error::config(
                "subcarrier, RF-chain and pilot-slot counts must all be at least 1",
            ));
        }
        for (name, v) in [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("antenna_spacing_m", self.antenna_spacing_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Center-carrier wavelength `c / f_c`.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    pub fn radius(&self) -> Result<f64> {
        uca_radius(self.antenna_spacing_m, self.num_antennas)
    }

    pub fn geometry(&self) -> Result<UcaGeometry> {
        UcaGeometry::new(self.radius()?, self.num_antennas)
    }

    /// Rows of the stacked combining matrix, `P * N_RF`.
    pub fn num_measurements(&self) -> usize {
        self.num_pilot_slots * self.num_rf_chains
    }

    /// `2 D^2 / lambda` with aperture `D = 2R`.
    pub fn rayleigh_distance(&self) -> Result<f64> {
        let d = 2.0 * self.radius()?;
        Ok(2.0 * d * d / self.wavelength())
    }
}

/// Radius of the circle on which adjacent antennas are separated by the
/// chord `spacing`.
pub fn uca_radius(spacing: f64, num_antennas: usize) -> Result<f64> {
    if num_antennas < 3 {
        return Err(Error::domain(format!(
            "a circular array needs at least 3 antennas, got {num_antennas}"
        )));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::domain(format!("antenna spacing must be positive, got {spacing}")));
    }
    Ok(spacing / (2.0 * (PI / num_antennas as f64).sin()))
}

/// Antennas on a circle of radius `R` in the z = 0 plane, antenna `n` at
/// azimuth `2 pi n / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcaGeometry {
    pub radius_m: f64,
    pub antenna_azimuths_rad: Vec<f64>,
    pub aperture_m: f64,
}

impl UcaGeometry {
    /// A zero radius is accepted and models a point array.
    pub fn new(radius_m: f64, num_antennas: usize) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::domain("geometry needs at least one antenna"));
        }
        if !(radius_m.is_finite() && radius_m >= 0.0) {
            return Err(Error::domain(format!("radius must be non-negative, got {radius_m}")));
        }
        let n = num_antennas as f64;
        Ok(UcaGeometry {
            radius_m,
            antenna_azimuths_rad: (0..num_antennas).map(|i| TAU * i as f64 / n).collect(),
            aperture_m: 2.0 * radius_m,
        })
    }

    pub fn len(&self) -> usize {
        self.antenna_azimuths_rad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antenna_azimuths_rad.is_empty()
    }

    /// Cartesian position of antenna `n`.
    pub fn position(&self, n: usize) -> [f64; 3] {
        let psi = self.antenna_azimuths_rad[n];
        [self.radius_m * psi.cos(), self.radius_m * psi.sin(), 0.0]
    }
}

/// One propagation path: source position in spherical coordinates plus
/// its complex gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathParams {
    pub distance_m: f64,
    pub elevation_rad: f64,
    pub azimuth_rad: f64,
    pub gain: Complex64,
}

impl PathParams {
    pub fn validate(&self, geom: &UcaGeometry) -> Result<()> {
        if !(self.distance_m.is_finite() && self.distance_m > geom.radius_m) {
            return Err(Error::domain(format!(
                "path distance {} m must exceed the array radius {} m",
                self.distance_m, geom.radius_m
            )));
        }
        if !(self.elevation_rad > 0.0 && self.elevation_rad <= FRAC_PI_2) {
            return Err(Error::domain(format!(
                "elevation {} rad outside (0, pi/2]",
                self.elevation_rad
            )));
        }
        if !(0.0..TAU).contains(&self.azimuth_rad) {
            return Err(Error::domain(format!(
                "azimuth {} rad outside [0, 2 pi)",
                self.azimuth_rad
            )));
        }
        if !(self.gain.re.is_finite() && self.gain.im.is_finite()) {
            return Err(Error::domain("path gain must be finite"));
        }
        Ok(())
    }
}

/// Frequency-domain channel `H = [h_1 .. h_M]`, one column per subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: CMatrix,
    pub config: SystemConfig,
}

impl ChannelMatrix {
    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.norm_squared()
    }
}

/// `f_m = f_c + (2m - M) B / (2M)` for `m = 1..=M`.
pub fn subcarrier_frequencies(config: &SystemConfig) -> Vec<f64> {
    let m_total = config.num_subcarriers as f64;
    (1..=config.num_subcarriers)
        .map(|m| {
            config.carrier_freq_hz + (2.0 * m as f64 - m_total) * config.bandwidth_hz / (2.0 * m_total)
        })
        .collect()
}

/// Exact distance from antenna `n` to the point `(r, theta, phi)`.
pub fn exact_distance(r: f64, theta: f64, phi: f64, n: usize, geom: &UcaGeometry) -> f64 {
    let big_r = geom.radius_m;
    let c = theta.sin() * (phi - geom.antenna_azimuths_rad[n]).cos();
    // clamp guards the collinear case against a tiny negative from rounding
    (r * r + big_r * big_r - 2.0 * big_r * r * c).max(0.0).sqrt()
}

/// Second-order Taylor approximation of [`exact_distance`] in `R / r`.
pub fn approx_distance(r: f64, theta: f64, phi: f64, n: usize, geom: &UcaGeometry) -> f64 {
    let big_r = geom.radius_m;
    let c = theta.sin() * (phi - geom.antenna_azimuths_rad[n]).cos();
    r - big_r * c + big_r * big_r / (2.0 * r) * (1.0 - c * c)
}

/// Unit-norm spherical-wave steering vector,
/// `b_n = exp(-j 2 pi / lambda (r_n - r)) / sqrt(N)`.
pub fn near_field_steering(r: f64, theta: f64, phi: f64, geom: &UcaGeometry, lambda: f64) -> CVector {
    let n = geom.len();
    let scale = 1.0 / (n as f64).sqrt();
    let k = TAU / lambda;
    CVector::from_fn(n, |i, _| {
        let delta = exact_distance(r, theta, phi, i, geom) - r;
        Complex64::from_polar(scale, -k * delta)
    })
}

/// Plane-wave limit of [`near_field_steering`] as `r -> infinity`.
pub fn far_field_steering(theta: f64, phi: f64, geom: &UcaGeometry, lambda: f64) -> CVector {
    let n = geom.len();
    let scale = 1.0 / (n as f64).sqrt();
    let k = TAU / lambda;
    let proj = geom.radius_m * theta.sin();
    CVector::from_fn(n, |i, _| {
        let phase = k * proj * (phi - geom.antenna_azimuths_rad[i]).cos();
        Complex64::from_polar(scale, phase)
    })
}

/// Superposes `L` spherical-wave paths on every subcarrier:
/// `h_m = sqrt(N/L) sum_l g_l exp(-j k_m r_l) b(r_l, theta_l, phi_l)`.
///
/// The steering vector uses the center wavelength; only the common
/// propagation phase depends on the subcarrier.
pub fn generate_channel(paths: &[PathParams], config: &SystemConfig) -> Result<ChannelMatrix> {
    config.validate()?;
    let geom = config.geometry()?;
    let n = config.num_antennas;
    if paths.is_empty() {
        return Err(Error::domain("channel needs at least one path"));
    }
    if paths.len() > n {
        return Err(Error::domain(format!(
            "{} paths exceed the antenna count {n}",
            paths.len()
        )));
    }
    for p in paths {
        p.validate(&geom)?;
    }
    let lambda = config.wavelength();
    let freqs = subcarrier_frequencies(config);
    let prefactor = (n as f64 / paths.len() as f64).sqrt();

    let mut entries = CMatrix::zeros(n, freqs.len());
    for p in paths {
        let b = near_field_steering(p.distance_m, p.elevation_rad, p.azimuth_rad, &geom, lambda);
        for (m, f) in freqs.iter().enumerate() {
            let k_m = TAU * f / SPEED_OF_LIGHT;
            let coeff = p.gain * Complex64::from_polar(prefactor, -k_m * p.distance_m);
            let mut col = entries.column_mut(m);
            col.axpy(coeff, &b, Complex64::new(1.0, 0.0));
        }
    }
    Ok(ChannelMatrix {
        entries,
        config: config.clone(),
    })
}

/// Uniform sampling boxes for user/scatterer positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRanges {
    pub distance_m: (f64, f64),
    pub elevation_rad: (f64, f64),
    pub azimuth_rad: (f64, f64),
}

impl UserRanges {
    /// 4-25 m, elevation (0, pi/2), azimuth (-pi/2, pi/2).
    pub fn paper() -> Self {
        UserRanges {
            distance_m: (4.0, 25.0),
            elevation_rad: (0.0, FRAC_PI_2),
            azimuth_rad: (-FRAC_PI_2, FRAC_PI_2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("distance", self.distance_m),
            ("elevation", self.elevation_rad),
            ("azimuth", self.azimuth_rad),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::domain(format!("{name} range ({lo}, {hi}) is empty or non-finite")));
            }
        }
        if self.distance_m.0 <= 0.0 {
            return Err(Error::domain("distance range must be positive"));
        }
        if self.elevation_rad.0 < 0.0 || self.elevation_rad.1 > FRAC_PI_2 {
            return Err(Error::domain("elevation range must lie within [0, pi/2]"));
        }
        if self.azimuth_rad.1 - self.azimuth_rad.0 > TAU {
            return Err(Error::domain("azimuth range wider than 2 pi"));
        }
        Ok(())
    }
}

/// Draws `count` paths uniformly inside `ranges` with circularly-symmetric
/// unit-variance complex Gaussian gains. Azimuths are wrapped to
/// `[0, 2 pi)`.
pub fn sample_paths(seed: u64, count: usize, ranges: &UserRanges) -> Result<Vec<PathParams>> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sample_one(&mut rng, ranges)).collect())
}

pub(crate) fn sample_one<R: Rng>(rng: &mut R, ranges: &UserRanges) -> PathParams {
    let distance_m = rng.random_range(ranges.distance_m.0..ranges.distance_m.1);
    let elevation_rad = loop {
        let t = rng.random_range(ranges.elevation_rad.0..ranges.elevation_rad.1);
        if t > 0.0 {
            break t;
        }
    };
    let azimuth_rad = rng
        .random_range(ranges.azimuth_rad.0..ranges.azimuth_rad.1)
        .rem_euclid(TAU);
    PathParams {
        distance_m,
        elevation_rad,
        azimuth_rad,
        gain: complex_normal(rng),
    }
}

/// Circularly-symmetric complex normal sample with unit variance.
pub(crate) fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    fn paper_config() -> SystemConfig {
        SystemConfig {
            carrier_freq_hz: 30e9,
            bandwidth_hz: 100e6,
            num_subcarriers: 16,
            num_antennas: 512,
            antenna_spacing_m: 0.005,
            num_rf_chains: 4,
            num_pilot_slots: 32,
        }
    }

    #[test]
    fn radius_examples() {
        assert!((uca_radius(0.005, 6).unwrap() - 0.005).abs() < 1e-15);
        assert!((uca_radius(0.005, 4).unwrap() - 0.005 / 2f64.sqrt()).abs() < 1e-15);
        assert!((uca_radius(0.005, 512).unwrap() - 0.40744).abs() < 1e-5);
        assert!(uca_radius(0.005, 2).is_err());
    }

    #[test]
    fn rayleigh_distance_near_reported_value() {
        let ray = paper_config().rayleigh_distance().unwrap();
        assert!((ray - 132.9).abs() / 132.9 < 5e-3, "{ray}");
    }

    #[test]
    fn subcarrier_grid() {
        let cfg = paper_config();
        let f = subcarrier_frequencies(&cfg);
        assert_eq!(f.len(), 16);
        assert_eq!(f[7], 30e9);
        assert_eq!(f[15], 30e9 + 50e6);
        assert!((f[0] - 29.95625e9).abs() < 1e-3);
    }

    #[test]
    fn chord_between_neighbours_is_spacing() {
        for n in [3usize, 7, 64, 512] {
            let geom = UcaGeometry::new(uca_radius(0.005, n).unwrap(), n).unwrap();
            for i in 0..n {
                let a = geom.position(i);
                let b = geom.position((i + 1) % n);
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!((d - 0.005).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn antenna_azimuths_start_at_zero_and_increase() {
        let geom = UcaGeometry::new(1.0, 16).unwrap();
        assert_eq!(geom.antenna_azimuths_rad[0], 0.0);
        assert!(geom.antenna_azimuths_rad.windows(2).all(|w| w[1] > w[0]));
        assert!(*geom.antenna_azimuths_rad.last().unwrap() < TAU);
    }

    #[test]
    fn distance_special_cases() {
        let point = UcaGeometry::new(0.0, 8).unwrap();
        assert_eq!(exact_distance(3.0, 0.4, 1.0, 2, &point), 3.0);
        let geom = UcaGeometry::new(0.40744, 512).unwrap();
        let psi = geom.antenna_azimuths_rad[10];
        assert!((exact_distance(10.0, FRAC_PI_2, psi, 10, &geom) - (10.0 - 0.40744)).abs() < 1e-12);
        assert!((approx_distance(10.0, 0.0, 0.3, 5, &geom) - (10.0 + 0.40744f64.powi(2) / 20.0)).abs() < 1e-12);
    }

    #[test]
    fn distance_direct_evaluation() {
        let geom = UcaGeometry::new(0.40744, 8).unwrap();
        // antenna 1 sits at psi = pi/4; phi = pi/2 gives phi - psi = pi/4
        let phi = FRAC_PI_2;
        let expected = (100.0 + 0.40744f64.powi(2)
            - 2.0 * 0.40744 * 10.0 * FRAC_PI_3.sin() * FRAC_PI_4.cos())
        .sqrt();
        let exact = exact_distance(10.0, FRAC_PI_3, phi, 1, &geom);
        assert!((exact - expected).abs() < 1e-12);
        assert!((exact - 9.755814).abs() < 1e-6);
        // the neglected third-order term is ~1.3e-4 m at r = 10 m
        let gap = exact - approx_distance(10.0, FRAC_PI_3, phi, 1, &geom);
        assert!((gap - 1.312978e-4).abs() < 1e-9, "{gap}");
    }

    #[test]
    fn approx_distance_asymptotic() {
        let geom = UcaGeometry::new(0.40744, 512).unwrap();
        let r = 1e6 * geom.radius_m;
        for n in [0, 100, 300] {
            let e = exact_distance(r, 0.7, 1.3, n, &geom);
            let a = approx_distance(r, 0.7, 1.3, n, &geom);
            assert!(((e - a) / e).abs() < 1e-9);
        }
    }

    #[test]
    fn steering_vectors_unit_norm() {
        let cfg = paper_config();
        let geom = cfg.geometry().unwrap();
        let lambda = cfg.wavelength();
        let b = near_field_steering(5.0, 0.9, 2.0, &geom, lambda);
        assert!((b.norm() - 1.0).abs() < 1e-12);
        assert!((b.dotc(&b).norm() - 1.0).abs() < 1e-12);
        let a = far_field_steering(0.9, 2.0, &geom, lambda);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_steering_is_constant() {
        let point = UcaGeometry::new(0.0, 8).unwrap();
        let b = near_field_steering(3.0, 0.5, 0.5, &point, 0.01);
        let geom = UcaGeometry::new(0.4, 8).unwrap();
        let a = far_field_steering(0.0, 0.5, &geom, 0.01);
        let c = 1.0 / 8f64.sqrt();
        for v in b.iter().chain(a.iter()) {
            assert!((v - Complex64::new(c, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn near_field_tends_to_far_field() {
        let cfg = paper_config();
        let geom = cfg.geometry().unwrap();
        let lambda = cfg.wavelength();
        let b = near_field_steering(1e7, 1.1, 0.4, &geom, lambda);
        let a = far_field_steering(1.1, 0.4, &geom, lambda);
        assert!((b - a).camax() < 1e-5);
    }

    #[test]
    fn single_path_column_norms() {
        let mut cfg = paper_config();
        cfg.num_subcarriers = 1;
        let path = PathParams {
            distance_m: 7.0,
            elevation_rad: 1.0,
            azimuth_rad: 0.3,
            gain: Complex64::new(1.0, 0.0),
        };
        let h = generate_channel(&[path], &cfg).unwrap();
        assert!((h.entries.column(0).norm() - 512f64.sqrt()).abs() < 1e-10);
        // M = 1 puts the only subcarrier at f_c + B/2
        let f = subcarrier_frequencies(&cfg)[0];
        let b = near_field_steering(7.0, 1.0, 0.3, &cfg.geometry().unwrap(), cfg.wavelength());
        let expected = b * Complex64::from_polar(512f64.sqrt(), -TAU * f / SPEED_OF_LIGHT * 7.0);
        assert!((h.entries.column(0) - expected).camax() < 1e-10);
    }

    #[test]
    fn generate_channel_errors() {
        let cfg = paper_config();
        assert!(matches!(generate_channel(&[], &cfg), Err(Error::Domain(_))));
        let inside = PathParams {
            distance_m: 0.1,
            elevation_rad: 1.0,
            azimuth_rad: 0.0,
            gain: Complex64::new(1.0, 0.0),
        };
        assert!(generate_channel(&[inside], &cfg).is_err());
    }

    #[test]
    fn zero_gains_give_zero_channel() {
        let cfg = paper_config();
        let mut paths = sample_paths(4, 3, &UserRanges::paper()).unwrap();
        for p in &mut paths {
            p.gain = Complex64::new(0.0, 0.0);
        }
        let h = generate_channel(&paths, &cfg).unwrap();
        assert_eq!(h.frobenius_norm_sqr(), 0.0);
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let ranges = UserRanges::paper();
        let a = sample_paths(11, 50, &ranges).unwrap();
        let b = sample_paths(11, 50, &ranges).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(p.distance_m >= 4.0 && p.distance_m < 25.0);
            assert!(p.elevation_rad > 0.0 && p.elevation_rad < FRAC_PI_2);
            assert!(p.azimuth_rad < FRAC_PI_2 || p.azimuth_rad >= 1.5 * PI);
        }
    }

    #[test]
    fn sampling_rejects_empty_ranges() {
        let mut r = UserRanges::paper();
        r.distance_m = (5.0, 5.0);
        assert!(sample_paths(0, 1, &r).is_err());
    }

    #[test]
    fn gain_variance_is_unit() {
        let paths = sample_paths(99, 10_000, &UserRanges::paper()).unwrap();
        let mean = paths.iter().map(|p| p.gain.norm_sqr()).sum::<f64>() / 1e4;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }
}
