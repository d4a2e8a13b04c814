//! Input-output theory of the reflection-operated amplifier: gain spectra,
//! phase-sensitive gain, self-oscillation threshold, and gain-bandwidth
//! extraction.
//!
//! Frames: the pump sits at ω_p; the rotating frame is referenced to ω_p/2,
//! so ω_rot = ω_lab - ω_p/2. Spectra are tabulated on the laboratory axis.

use num_complex::Complex64;

use crate::circuit::{derive_dpa_params, DpaParams, DriveCondition, FilmDevice};
use crate::error::{Error, Result};
use crate::units::{amplitude_db, db_power, power_db};

/// Signal and idler transfer gains at one rotating-frame offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferGains {
    /// Complex signal gain g_s.
    pub g_s: Complex64,
    /// Complex idler gain g_i.
    pub g_i: Complex64,
    /// Rotating-frame frequency offset (rad/s).
    pub omega: f64,
}

impl TransferGains {
    /// Relative residual of the gain identity
    /// |g_i|² (1 + γ/κ) = |g_s|² + (γ/κ)|g_s+1|² - 1,
    /// evaluated with the real part of κ.
    pub fn commutation_residual(&self, params: &DpaParams) -> f64 {
        let ratio = params.gamma / params.kappa.re;
        let lhs = self.g_i.norm_sqr() * (1.0 + ratio);
        let rhs = self.g_s.norm_sqr() + ratio * (self.g_s + 1.0).norm_sqr() - 1.0;
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
    }
}

/// Gain spectrum on a strictly increasing laboratory-frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    freq_hz: Vec<f64>,
    gain_db: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from power gain in dB; the axis must be strictly
    /// increasing and at least three points long.
    pub fn new(freq_hz: Vec<f64>, gain_db: Vec<f64>) -> Result<Self> {
        if freq_hz.len() != gain_db.len() {
            return Err(Error::DegenerateInput(
                "frequency and gain arrays differ in length".into(),
            ));
        }
        if freq_hz.len() < 3 {
            return Err(Error::DegenerateInput(
                "spectrum needs at least three points".into(),
            ));
        }
        if !freq_hz.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::DegenerateInput(
                "frequency axis must be strictly increasing".into(),
            ));
        }
        Ok(Self { freq_hz, gain_db })
    }

    /// Builds a spectrum from complex reflection values, storing |Γ|² in dB.
    pub fn from_reflection(freq_hz: Vec<f64>, gamma: &[Complex64]) -> Result<Self> {
        let gain_db = gamma.iter().map(|g| power_db(g.norm_sqr())).collect();
        Self::new(freq_hz, gain_db)
    }

    pub fn freq_hz(&self) -> &[f64] {
        &self.freq_hz
    }

    pub fn gain_db(&self) -> &[f64] {
        &self.gain_db
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }
}

/// Peak gain, bandwidth, and their product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainBandwidth {
    /// Peak power gain (dB).
    pub peak_gain_db: f64,
    /// Full width between the G/√2 amplitude crossings (Hz).
    pub bandwidth_hz: f64,
    /// Peak amplitude gain times bandwidth (Hz).
    pub gbp_hz: f64,
}

fn kappa_bar(params: &DpaParams) -> Complex64 {
    (params.kappa + params.gamma) / 2.0
}

/// Real-κ half linewidth (κ_re + γ)/2 used by the threshold test.
fn kappa_bar_re(params: &DpaParams) -> f64 {
    0.5 * (params.kappa.re + params.gamma)
}

/// Signed self-oscillation margin |ξ|² / (Δ² + ((Re κ + γ)/2)²) - 1.
///
/// Positive means the device oscillates instead of amplifying. The imaginary
/// part of κ is treated as a small perturbation and ignored here.
pub fn oscillation_margin(params: &DpaParams) -> f64 {
    let kb = kappa_bar_re(params);
    let denom = params.delta * params.delta + kb * kb;
    let xi2 = params.xi.norm_sqr();
    if denom == 0.0 {
        return if xi2 == 0.0 { -1.0 } else { f64::INFINITY };
    }
    xi2 / denom - 1.0
}

/// True when the operating point is strictly beyond the oscillation boundary.
pub fn is_above_threshold(params: &DpaParams) -> bool {
    oscillation_margin(params) > 0.0
}

fn check_below_threshold(params: &DpaParams) -> Result<()> {
    let margin = oscillation_margin(params);
    if margin > 0.0 {
        return Err(Error::AboveThreshold { margin });
    }
    Ok(())
}

/// Unchecked reflection evaluation at a rotating-frame offset.
pub(crate) fn reflection_gamma_rot(params: &DpaParams, omega_rot: f64) -> Complex64 {
    let kb = kappa_bar(params);
    let d = params.delta * params.delta + (kb + Complex64::new(0.0, omega_rot)).powi(2)
        - params.xi.norm_sqr();
    let numer = params.kappa * (kb + Complex64::new(0.0, params.delta + omega_rot));
    numer / d - 1.0
}

fn denominator_scale(params: &DpaParams, omega_rot: f64) -> f64 {
    params.delta * params.delta
        + kappa_bar(params).norm_sqr()
        + params.xi.norm_sqr()
        + omega_rot * omega_rot
}

/// Complex reflection Γ at laboratory frequency `omega_lab` for a pump at
/// `omega_p` (both rad/s). |Γ|² is the phase-insensitive power gain.
pub fn reflection_gain(params: &DpaParams, omega_lab: f64, omega_p: f64) -> Result<Complex64> {
    check_below_threshold(params)?;
    let omega_rot = omega_lab - 0.5 * omega_p;
    let kb = kappa_bar(params);
    let d = params.delta * params.delta + (kb + Complex64::new(0.0, omega_rot)).powi(2)
        - params.xi.norm_sqr();
    if d.norm() <= 1e-12 * denominator_scale(params, omega_rot) {
        return Err(Error::Singularity(
            "reflection evaluated at a zero of the response denominator".into(),
        ));
    }
    let numer = params.kappa * (kb + Complex64::new(0.0, params.delta + omega_rot));
    Ok(numer / d - 1.0)
}

/// Signal and idler gains at rotating-frame offset `omega` (rad/s).
pub fn signal_idler_gains(params: &DpaParams, omega: f64) -> Result<TransferGains> {
    check_below_threshold(params)?;
    let kb = kappa_bar(params);
    let d = params.delta * params.delta + (kb - Complex64::new(0.0, omega)).powi(2)
        - params.xi.norm_sqr();
    if d.norm() <= 1e-12 * denominator_scale(params, omega) {
        return Err(Error::Singularity(
            "transfer gains evaluated at a zero of the response denominator".into(),
        ));
    }
    let g_s = params.kappa * (kb - Complex64::new(0.0, params.delta + omega)) / d - 1.0;
    let g_i = -Complex64::new(0.0, 1.0) * params.xi * params.kappa / d;
    Ok(TransferGains { g_s, g_i, omega })
}

/// Band-center amplitude gain |Γ| as a function of the pump phase.
///
/// Uses the real part of κ; the mixing strength is |ξ| from `params` with the
/// phase taken from `varphi_p`. φ_p = 3π/2 amplifies, φ_p = π/2 deamplifies
/// (for Δ = 0); the power gain is the square of the returned value.
pub fn phase_sensitive_gain(params: &DpaParams, varphi_p: f64) -> Result<f64> {
    check_below_threshold(params)?;
    let kappa = params.kappa.re;
    let kb = kappa_bar_re(params);
    let xi = params.xi.norm();
    let d0 = params.delta * params.delta + kb * kb - xi * xi;
    if d0.abs() <= 1e-12 * denominator_scale(params, 0.0) {
        return Err(Error::Singularity(
            "phase-sensitive gain diverges at the oscillation boundary".into(),
        ));
    }
    let re = kappa * (kb - xi * varphi_p.sin()) / d0 - 1.0;
    let im = kappa * (params.delta + xi * varphi_p.cos()) / d0;
    Ok(re.hypot(im))
}

/// Finds the pump power (dBm) where the oscillation margin crosses zero.
///
/// `kappa_of_power` tabulates the fitted real coupling rate (rad/s) against
/// pump power (dBm); values between entries are linearly interpolated on the
/// dBm axis. The drive's own pump power is ignored; everything else (bias,
/// line attenuation, pump frequency) is held fixed while bisecting.
pub fn threshold_pump_power(
    device: &FilmDevice,
    drive: &DriveCondition,
    kappa_of_power: &[(f64, f64)],
) -> Result<f64> {
    device.validate()?;
    drive.validate()?;
    if kappa_of_power.len() < 2 {
        return Err(Error::Config(
            "kappa_of_power needs at least two entries".into(),
        ));
    }
    if !kappa_of_power.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::Config(
            "kappa_of_power must be strictly increasing in power".into(),
        ));
    }

    let interp = |p: f64| -> f64 {
        let seg = kappa_of_power
            .windows(2)
            .find(|w| p <= w[1].0)
            .unwrap_or(&kappa_of_power[kappa_of_power.len() - 2..]);
        let t = (p - seg[0].0) / (seg[1].0 - seg[0].0);
        seg[0].1 + t * (seg[1].1 - seg[0].1)
    };
    let margin_at = |p: f64| -> Result<f64> {
        let drv = DriveCondition {
            p_pump_dbm: p,
            ..*drive
        };
        let params = derive_dpa_params(device, &drv, Some(Complex64::new(interp(p), 0.0)))?;
        Ok(oscillation_margin(&params))
    };

    let (mut lo, mut hi) = (
        kappa_of_power[0].0,
        kappa_of_power[kappa_of_power.len() - 1].0,
    );
    let m_lo = margin_at(lo)?;
    let m_hi = margin_at(hi)?;
    if m_lo == 0.0 {
        return Ok(lo);
    }
    if m_hi == 0.0 {
        return Ok(hi);
    }
    if m_lo > 0.0 || m_hi < 0.0 {
        return Err(Error::Bracketing(format!(
            "margin does not change sign over [{lo}, {hi}] dBm (margins {m_lo:.3e}, {m_hi:.3e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-9 {
            return Ok(mid);
        }
        if margin_at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Peak amplitude gain and the full width between its G/√2 crossings.
///
/// Crossings are resolved by linear interpolation between adjacent samples;
/// when a side crosses the level more than once, the crossing nearest the peak
/// wins. The spectrum must have a unique interior maximum.
pub fn gain_bandwidth_product(spectrum: &Spectrum) -> Result<GainBandwidth> {
    let f = spectrum.freq_hz();
    let g = spectrum.gain_db();
    let peak_idx = g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("spectrum is non-empty by construction");
    let peak_db = g[peak_idx];
    if g.iter().filter(|&&v| v == peak_db).count() > 1 {
        return Err(Error::Extraction("spectrum maximum is not unique".into()));
    }
    if peak_idx == 0 || peak_idx == g.len() - 1 {
        return Err(Error::Extraction(
            "spectrum maximum sits on the axis boundary".into(),
        ));
    }

    // Amplitude gain G/√2 is -10 log10(2) in power dB.
    let level = peak_db - 10.0 * 2f64.log10();
    let cross = |i: usize, j: usize| -> f64 {
        let t = (level - g[i]) / (g[j] - g[i]);
        f[i] + t * (f[j] - f[i])
    };
    let left = (0..peak_idx)
        .rev()
        .find(|&i| g[i] <= level)
        .map(|i| cross(i, i + 1));
    let right = (peak_idx + 1..g.len())
        .find(|&i| g[i] <= level)
        .map(|i| cross(i, i - 1));
    let (Some(f_left), Some(f_right)) = (left, right) else {
        return Err(Error::Extraction(
            "G/√2 crossings are not bracketed by the frequency axis".into(),
        ));
    };

    let peak_amplitude = db_power(peak_db).sqrt();
    let bandwidth_hz = f_right - f_left;
    Ok(GainBandwidth {
        peak_gain_db: peak_db,
        bandwidth_hz,
        gbp_hz: peak_amplitude * bandwidth_hz,
    })
}

/// Convenience: |Γ|² in dB at a laboratory frequency.
pub fn reflection_gain_db(params: &DpaParams, omega_lab: f64, omega_p: f64) -> Result<f64> {
    Ok(amplitude_db(
        reflection_gain(params, omega_lab, omega_p)?.norm(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(kappa_hz: f64, gamma_hz: f64, delta_hz: f64, xi_hz: f64) -> DpaParams {
        DpaParams {
            kappa: Complex64::new(angular(kappa_hz), 0.0),
            gamma: angular(gamma_hz),
            delta: angular(delta_hz),
            xi: Complex64::new(angular(xi_hz), 0.0),
            kerr: -1.0,
            delta_dc: 0.0,
            delta_p: 0.0,
        }
    }

    #[test]
    fn lossless_overcoupled_full_reflection() {
        let p = params(53e6, 0.0, 0.0, 0.0);
        let g = reflection_gain(&p, 0.5 * angular(14.381e9), angular(14.381e9)).unwrap();
        assert_relative_eq!(g.re, 1.0, max_relative = 1e-12);
        assert!(g.im.abs() < 1e-12);
    }

    #[test]
    fn critical_coupling_absorbs_everything() {
        let p = params(53e6, 53e6, 0.0, 0.0);
        let g = reflection_gain(&p, 0.5 * angular(14.381e9), angular(14.381e9)).unwrap();
        assert!(g.norm() < 1e-12);
    }

    #[test]
    fn band_center_gain_with_pump_on() {
        let p = params(53e6, 7.2e9 / 1e5, 0.0, 17.2e6);
        let db = reflection_gain_db(&p, 0.5 * angular(14.381e9), angular(14.381e9)).unwrap();
        assert_relative_eq!(db, 7.763, max_relative = 1e-3);
    }

    #[test]
    fn reflection_rejects_oscillating_params() {
        let p = params(53e6, 0.0, 0.0, 40e6);
        assert!(matches!(
            reflection_gain(&p, 7.19e9, angular(14.381e9)),
            Err(Error::AboveThreshold { .. })
        ));
    }

    #[test]
    fn reflection_singular_on_the_boundary() {
        let p = params(53e6, 0.0, 0.0, 26.5e6);
        assert_relative_eq!(oscillation_margin(&p), 0.0, epsilon = 1e-12);
        let omega_p = angular(14.381e9);
        assert!(matches!(
            reflection_gain(&p, 0.5 * omega_p, omega_p),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn phase_sensitive_extremes() {
        let p = params(53e6, 0.0, 0.0, 17.2e6);
        let amp = phase_sensitive_gain(&p, 1.5 * PI).unwrap();
        let deamp = phase_sensitive_gain(&p, 0.5 * PI).unwrap();
        assert_relative_eq!(amp, 4.69893, max_relative = 1e-4);
        assert_relative_eq!(deamp, 0.21281, max_relative = 1e-4);
        assert_relative_eq!(
            crate::units::power_db(amp * amp),
            13.44,
            max_relative = 1e-3
        );
        assert_relative_eq!(amp * deamp, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn phase_sensitive_flat_without_mixing() {
        let p = params(53e6, 1e5, 1e6, 0.0);
        let g0 = phase_sensitive_gain(&p, 0.0).unwrap();
        for k in 1..16 {
            let g = phase_sensitive_gain(&p, k as f64 * PI / 8.0).unwrap();
            assert_relative_eq!(g, g0, max_relative = 1e-12);
        }
    }

    #[test]
    fn phase_sensitive_matches_transfer_gain_sum() {
        for &phi in &[0.0, 0.7, 0.5 * PI, 2.5, 1.5 * PI, 5.9] {
            let mut p = params(53e6, 2e5, 3e6, 17.2e6);
            p.xi = Complex64::from_polar(angular(17.2e6), -phi);
            let gains = signal_idler_gains(&p, 0.0).unwrap();
            assert_relative_eq!(
                (gains.g_s + gains.g_i).norm(),
                phase_sensitive_gain(&p, phi).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn idler_gain_vanishes_without_mixing() {
        let p = params(53e6, 1e5, 2e6, 0.0);
        for &w in &[-1e8, 0.0, 3e7] {
            assert_eq!(signal_idler_gains(&p, w).unwrap().g_i.norm(), 0.0);
        }
    }

    #[test]
    fn commutation_identity_at_oracle_point() {
        let p = params(53e6, 7.2e9 / 1e5, 1.3e6, 17.2e6);
        for &w in &[0.0, angular(5e6), -angular(40e6)] {
            let g = signal_idler_gains(&p, w).unwrap();
            assert!(g.commutation_residual(&p) < 1e-12);
        }
    }

    #[test]
    fn diagonal_symplectic_pair() {
        let mut p = params(53e6, 0.0, 0.0, 17.2e6);
        p.xi = Complex64::from_polar(angular(17.2e6), -1.5 * PI);
        let g = signal_idler_gains(&p, 0.0).unwrap();
        let product = (g.g_s + g.g_i).norm() * (g.g_s - g.g_i).norm();
        assert_relative_eq!(product, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn margin_trivia() {
        let p = params(53e6, 0.0, 0.0, 0.0);
        assert_eq!(oscillation_margin(&p), -1.0);
        let p = params(40e6, 13e6, 0.0, 26.5e6);
        assert_relative_eq!(oscillation_margin(&p), 0.0, epsilon = 1e-12);
        assert!(!is_above_threshold(&p));
        let p = params(40e6, 13e6, 0.0, 26.6e6);
        assert!(is_above_threshold(&p));
    }

    fn threshold_setup() -> (FilmDevice, DriveCondition) {
        let device = FilmDevice {
            l_total: 3.84e-9,
            i_star: 5.10e-3,
            omega0: angular(7.2e9),
            z0: 118.0,
            q_internal: 1e9,
            q_coupling: None,
        };
        let drive = DriveCondition {
            i_dc: 0.834e-3,
            p_pump_dbm: 0.0,
            lambda_p_db: 22.8,
            omega_p: 0.0,
            varphi_p: 0.0,
        };
        (device, drive)
    }

    #[test]
    fn threshold_matches_closed_form_inversion() {
        // Independent oracle at Δ = 0, constant κ, γ ≈ 0: the margin crosses
        // zero when |ξ| = κ/2, i.e. I_p = 4|ξ|I_*²/(I_DC ω0), converted back
        // to source power through the line attenuation.
        let (device, mut drive) = threshold_setup();
        let xi_th = 0.5 * angular(53e6);
        let i_p = 4.0 * xi_th * device.i_star * device.i_star / (drive.i_dc * device.omega0);
        let p_watt = i_p * i_p * device.z0 / (2.0 * crate::units::transmittance(drive.lambda_p_db));
        let oracle_dbm = crate::units::watt_to_dbm(p_watt);
        assert_relative_eq!(oracle_dbm, 3.75, max_relative = 1e-2);

        // Pump frequency chosen so Δ = 0 exactly at the oracle crossing.
        let delta_p = -0.125 * (i_p / device.i_star).powi(2) * device.omega0;
        let delta_dc = -0.5 * (drive.i_dc / device.i_star).powi(2) * device.omega0;
        drive.omega_p = 2.0 * (device.omega0 + delta_dc + delta_p);
        let table = [(-10.0, angular(53e6)), (10.0, angular(53e6))];
        let found = threshold_pump_power(&device, &drive, &table).unwrap();
        assert_relative_eq!(found, oracle_dbm, epsilon = 1e-3);
    }

    #[test]
    fn doubling_bias_lowers_threshold_six_db() {
        // With the pump retuned onto the shifted resonance at each bias, the
        // threshold pump current scales as 1/I_DC, so the power drops 6 dB.
        let (device, mut drive) = threshold_setup();
        let table = [(-20.0, angular(53e6)), (15.0, angular(53e6))];
        let mut found = [0.0; 2];
        for (slot, scale) in found.iter_mut().zip([1.0, 2.0]) {
            drive.i_dc = 0.834e-3 * scale;
            let xi_th = 0.5 * angular(53e6);
            let i_p = 4.0 * xi_th * device.i_star * device.i_star / (drive.i_dc * device.omega0);
            let delta_p = -0.125 * (i_p / device.i_star).powi(2) * device.omega0;
            let delta_dc = -0.5 * (drive.i_dc / device.i_star).powi(2) * device.omega0;
            drive.omega_p = 2.0 * (device.omega0 + delta_dc + delta_p);
            *slot = threshold_pump_power(&device, &drive, &table).unwrap();
        }
        assert_relative_eq!(found[0] - found[1], 6.02, max_relative = 2e-2);
    }

    #[test]
    fn threshold_needs_a_sign_change() {
        let (device, mut drive) = threshold_setup();
        drive.omega_p = 2.0 * angular(7.19e9);
        let table = [(-30.0, angular(53e6)), (-20.0, angular(53e6))];
        assert!(matches!(
            threshold_pump_power(&device, &drive, &table),
            Err(Error::Bracketing(_))
        ));
    }

    fn lorentzian_spectrum(f0: f64, fwhm: f64, peak_amp: f64) -> Spectrum {
        let n = 4001;
        let span = 12.0 * fwhm;
        let freq: Vec<f64> = (0..n)
            .map(|i| f0 - span / 2.0 + span * i as f64 / (n - 1) as f64)
            .collect();
        let gain: Vec<f64> = freq
            .iter()
            .map(|&f| {
                let x = 2.0 * (f - f0) / fwhm;
                amplitude_db(peak_amp / (1.0 + x * x).sqrt())
            })
            .collect();
        Spectrum::new(freq, gain).unwrap()
    }

    #[test]
    fn lorentzian_self_consistency() {
        // For |H| = G/sqrt(1+x²) the amplitude -3 dB width equals the FWHM
        // parameter itself, so gbp = G·FWHM.
        let s = lorentzian_spectrum(7.19e9, 20e6, 31.6227766);
        let r = gain_bandwidth_product(&s).unwrap();
        assert_relative_eq!(r.bandwidth_hz, 20e6, max_relative = 1e-6);
        assert_relative_eq!(r.gbp_hz, 31.6227766 * 20e6, max_relative = 1e-6);
        assert_relative_eq!(r.peak_gain_db, 30.0, max_relative = 1e-9);
    }

    #[test]
    fn doubling_amplitudes_doubles_gbp() {
        let s1 = lorentzian_spectrum(7.19e9, 20e6, 10.0);
        let s2 = lorentzian_spectrum(7.19e9, 20e6, 20.0);
        let r1 = gain_bandwidth_product(&s1).unwrap();
        let r2 = gain_bandwidth_product(&s2).unwrap();
        assert_relative_eq!(r2.gbp_hz, 2.0 * r1.gbp_hz, max_relative = 1e-9);
        assert_relative_eq!(r2.bandwidth_hz, r1.bandwidth_hz, max_relative = 1e-9);
        assert_relative_eq!(
            r2.peak_gain_db,
            r1.peak_gain_db + 6.0206,
            max_relative = 1e-4
        );
    }

    #[test]
    fn gbp_requires_bracketed_crossings() {
        let freq: Vec<f64> = (0..101).map(|i| 7e9 + 1e5 * i as f64).collect();
        let gain: Vec<f64> = (0..101)
            .map(|i| {
                let x = (i as f64 - 50.0) / 300.0;
                10.0 - x * x
            })
            .collect();
        let s = Spectrum::new(freq, gain).unwrap();
        assert!(matches!(
            gain_bandwidth_product(&s),
            Err(Error::Extraction(_))
        ));
    }

    #[test]
    fn gbp_rejects_boundary_peak() {
        let freq: Vec<f64> = (0..11).map(|i| 7e9 + 1e6 * i as f64).collect();
        let gain: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let s = Spectrum::new(freq, gain).unwrap();
        assert!(matches!(
            gain_bandwidth_product(&s),
            Err(Error::Extraction(_))
        ));
    }

    #[test]
    fn spectrum_axis_must_increase() {
        assert!(Spectrum::new(vec![1.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(Spectrum::new(vec![1.0, 2.0], vec![0.0; 2]).is_err());
    }
}
