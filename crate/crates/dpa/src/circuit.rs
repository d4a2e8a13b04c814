//! Device and drive descriptions, and their reduction to effective
//! parametric-amplifier model parameters.
//!
//! The device is a current-biased superconducting resonator whose kinetic
//! inductance grows quadratically with current, L(I) = L0 (1 + I²/I*²).
//! Applying a DC bias plus a pump near twice the resonance turns the resonator
//! into a three-wave-mixing degenerate parametric amplifier. This module
//! computes the resulting detunings, mixing strength, and Kerr constant.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::HBAR;

/// Static resonator and film parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmDevice {
    /// Total kinetic inductance L_T (henry).
    pub l_total: f64,
    /// Nonlinearity scale current I_* (ampere).
    pub i_star: f64,
    /// Zero-bias fundamental angular frequency ω0 (rad/s).
    pub omega0: f64,
    /// Resonator characteristic impedance Z0 (ohm).
    pub z0: f64,
    /// Internal quality factor Q_i.
    pub q_internal: f64,
    /// Coupling quality factor Q_c; optional when κ is supplied directly.
    pub q_coupling: Option<f64>,
}

impl FilmDevice {
    /// Checks the type invariants: strictly positive fields, Q_i >= 1.
    pub fn validate(&self) -> Result<()> {
        if !(self.l_total > 0.0 && self.i_star > 0.0 && self.omega0 > 0.0 && self.z0 > 0.0) {
            return Err(Error::Domain(
                "device parameters must be strictly positive".into(),
            ));
        }
        if !(self.q_internal >= 1.0) {
            return Err(Error::Domain("q_internal must be >= 1".into()));
        }
        if let Some(qc) = self.q_coupling {
            if !(qc > 0.0) {
                return Err(Error::Domain("q_coupling must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Bias and pump settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveCondition {
    /// DC bias current I_DC (ampere).
    pub i_dc: f64,
    /// Pump power at the source (dBm).
    pub p_pump_dbm: f64,
    /// Pump line attenuation λ_p (dB, >= 0); transmittance is 10^(-dB/10).
    pub lambda_p_db: f64,
    /// Pump angular frequency ω_p (rad/s).
    pub omega_p: f64,
    /// Pump phase φ_p (radian).
    pub varphi_p: f64,
}

impl DriveCondition {
    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        if self.i_dc < 0.0 {
            return Err(Error::Domain("i_dc must be >= 0".into()));
        }
        if self.lambda_p_db < 0.0 {
            return Err(Error::Domain("lambda_p_db must be >= 0".into()));
        }
        if !(self.omega_p > 0.0) {
            return Err(Error::Domain("omega_p must be positive".into()));
        }
        Ok(())
    }
}

/// Effective model parameters consumed by all physics operations.
///
/// `delta = omega0 + delta_dc + delta_p - omega_p/2` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpaParams {
    /// Complex port coupling rate κ (rad/s).
    pub kappa: Complex64,
    /// Internal loss rate γ (rad/s).
    pub gamma: f64,
    /// Detuning Δ of the biased mode from half the pump frequency (rad/s).
    pub delta: f64,
    /// Complex three-wave-mixing strength ξ (rad/s).
    pub xi: Complex64,
    /// Kerr constant K (rad/s, <= 0).
    pub kerr: f64,
    /// DC-bias detuning contribution δ_DC (rad/s).
    pub delta_dc: f64,
    /// Pump-power detuning contribution δ_p (rad/s).
    pub delta_p: f64,
}

/// Current-dependent kinetic inductance L(I) = l0 (1 + (i/i_star)²).
///
/// Works for per-unit-length or total inductance alike; even in `i`.
pub fn kinetic_inductance(l0: f64, i: f64, i_star: f64) -> Result<f64> {
    if !(i_star > 0.0) {
        return Err(Error::Domain("i_star must be positive".into()));
    }
    let r = i / i_star;
    Ok(l0 * (1.0 + r * r))
}

/// Pump current amplitude reaching the device.
///
/// I_p = sqrt(2 · 10^(-λ_dB/10) · P_W / Z0) with P_W the source power in watts.
pub fn pump_current(p_pump_dbm: f64, lambda_p_db: f64, z0: f64) -> Result<f64> {
    if !(z0 > 0.0) {
        return Err(Error::Domain("z0 must be positive".into()));
    }
    let p_watt = crate::units::dbm_to_watt(p_pump_dbm);
    let transmitted = crate::units::transmittance(lambda_p_db) * p_watt;
    Ok((2.0 * transmitted / z0).sqrt())
}

/// Self-Kerr constant K = -(3/8) ħ ω0² / (L_T I_*²), always negative.
pub fn kerr_constant(device: &FilmDevice) -> Result<f64> {
    device.validate()?;
    Ok(-(3.0 / 8.0) * HBAR * device.omega0 * device.omega0
        / (device.l_total * device.i_star * device.i_star))
}

/// Bias-shifted resonance ω0 (1 - I_DC²/(2 I_*²)).
pub fn biased_resonance(device: &FilmDevice, i_dc: f64) -> Result<f64> {
    device.validate()?;
    let r = i_dc / device.i_star;
    Ok(device.omega0 * (1.0 - 0.5 * r * r))
}

/// Reduces a device and drive to the effective model parameters.
///
/// δ_DC = -(1/2)(I_DC/I_*)² ω0, δ_p = -(1/8)(I_p/I_*)² ω0,
/// ξ = -(1/4)(I_DC I_p / I_*²) ω0 e^(-iφ_p), Δ = ω0 + δ_DC + δ_p - ω_p/2,
/// γ = ω0/Q_i. κ is the explicit `kappa` when given, otherwise ω0/Q_c (real).
pub fn derive_dpa_params(
    device: &FilmDevice,
    drive: &DriveCondition,
    kappa: Option<Complex64>,
) -> Result<DpaParams> {
    device.validate()?;
    drive.validate()?;

    let kappa = match (kappa, device.q_coupling) {
        (Some(k), _) => k,
        (None, Some(qc)) => Complex64::new(device.omega0 / qc, 0.0),
        (None, None) => {
            return Err(Error::Config(
                "coupling rate unspecified: provide q_coupling or an explicit kappa".into(),
            ))
        }
    };

    let i_p = pump_current(drive.p_pump_dbm, drive.lambda_p_db, device.z0)?;
    let i_star2 = device.i_star * device.i_star;
    let delta_dc = -0.5 * (drive.i_dc * drive.i_dc / i_star2) * device.omega0;
    let delta_p = -0.125 * (i_p * i_p / i_star2) * device.omega0;
    let xi_mag = 0.25 * (drive.i_dc * i_p / i_star2) * device.omega0;
    let xi = -xi_mag * Complex64::from_polar(1.0, -drive.varphi_p);
    let delta = device.omega0 + delta_dc + delta_p - 0.5 * drive.omega_p;

    Ok(DpaParams {
        kappa,
        gamma: device.omega0 / device.q_internal,
        delta,
        xi,
        kerr: kerr_constant(device)?,
        delta_dc,
        delta_p,
    })
}
