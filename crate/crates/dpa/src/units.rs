//! Physical constants and unit conversions.
//!
//! Library-internal rates and frequencies are angular (rad/s). Cyclic
//! frequencies (Hz), decibels, and dBm appear only at the boundaries, and every
//! conversion between the two worlds lives here so each convention is defined
//! exactly once.

use std::f64::consts::TAU;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;

/// Cyclic frequency (Hz) to angular frequency (rad/s).
pub fn angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Angular frequency (rad/s) to cyclic frequency (Hz).
pub fn cyclic(omega: f64) -> f64 {
    omega / TAU
}

/// Power ratio to decibels.
pub fn power_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Decibels to power ratio.
pub fn db_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Amplitude ratio to decibels (20 log10).
pub fn amplitude_db(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

/// Power in dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Power in watts to dBm.
pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

/// Attenuation in dB (>= 0) to linear power transmittance in (0, 1].
pub fn transmittance(atten_db: f64) -> f64 {
    10f64.powf(-atten_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dbm_watt_round_trip() {
        assert_relative_eq!(dbm_to_watt(0.0), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watt(-30.0), 1e-6, max_relative = 1e-12);
        assert_relative_eq!(watt_to_dbm(dbm_to_watt(4.22)), 4.22, max_relative = 1e-12);
    }

    #[test]
    fn db_conventions() {
        assert_relative_eq!(power_db(100.0), 20.0, max_relative = 1e-12);
        assert_relative_eq!(amplitude_db(10.0), 20.0, max_relative = 1e-12);
        assert_relative_eq!(db_power(3.0), 1.9952623149688795, max_relative = 1e-12);
        assert_relative_eq!(
            transmittance(22.8),
            5.248074602497723e-3,
            max_relative = 1e-12
        );
        assert_eq!(transmittance(f64::INFINITY), 0.0);
    }

    #[test]
    fn angular_cyclic_round_trip() {
        assert_relative_eq!(cyclic(angular(7.2e9)), 7.2e9, max_relative = 1e-15);
        assert_relative_eq!(angular(1.0), TAU, max_relative = 1e-15);
    }
}
