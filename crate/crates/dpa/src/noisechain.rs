//! Detection-chain noise modeling: thermal occupations, attenuator/amplifier
//! aggregation, amplifier excess noise, predicted analyzer powers, and
//! input-referred noise photon numbers.
//!
//! Chain layout: sample → attenuator α1 (stage 1) → attenuator α2 (stage 2) →
//! cryogenic amplifier (G_H, n_H) → room-temperature amplifier (G_R, n_R) →
//! analyzer. `z` converts photons at the analyzer reference plane to watts in
//! the implicit resolution bandwidth.

use num_complex::Complex64;

use crate::circuit::DpaParams;
use crate::error::{Error, Result};
use crate::iotheory::{phase_sensitive_gain, signal_idler_gains};
use crate::units::{HBAR, KB};

/// Amplifier operating configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Signal detuned from band center; phase-insensitive gain.
    NonDegenerate,
    /// Signal at band center; phase-sensitive single-quadrature gain.
    Degenerate,
}

/// Field environment at the amplifier input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// Signal frequency (Hz).
    pub frequency: f64,
    /// Field temperature (kelvin).
    pub temperature: f64,
    /// Thermal occupation at (frequency, temperature), set by construction.
    pub n_th: f64,
}

impl Environment {
    pub fn new(frequency_hz: f64, temperature_k: f64) -> Result<Self> {
        Ok(Self {
            frequency: frequency_hz,
            temperature: temperature_k,
            n_th: thermal_occupation(frequency_hz, temperature_k)?,
        })
    }
}

/// Post-amplifier detection chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain {
    /// Attenuator power transmittances, linear, in (0, 1].
    pub alpha1: f64,
    pub alpha2: f64,
    /// Attenuator physical temperatures (kelvin).
    pub t_stage1: f64,
    pub t_stage2: f64,
    /// Amplifier power gains, linear, >= 1.
    pub g_hemt: f64,
    pub g_room: f64,
    /// Amplifier added-noise photon numbers, >= 0.
    pub n_hemt: f64,
    pub n_room: f64,
    /// Photon-to-watt conversion at the analyzer (watt/photon).
    pub z: f64,
}

impl DetectionChain {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::Domain(format!("{name} must lie in (0, 1]")));
            }
        }
        if self.t_stage1 < 0.0 || self.t_stage2 < 0.0 {
            return Err(Error::Domain("stage temperatures must be >= 0".into()));
        }
        if self.g_hemt < 1.0 || self.g_room < 1.0 {
            return Err(Error::Domain("amplifier gains must be >= 1".into()));
        }
        if self.n_hemt < 0.0 || self.n_room < 0.0 {
            return Err(Error::Domain("amplifier noise photons must be >= 0".into()));
        }
        if !(self.z > 0.0) {
            return Err(Error::Domain("z must be positive".into()));
        }
        Ok(())
    }
}

/// Aggregate gain and system noise of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainAggregate {
    /// Net power gain G_T = G_R G_H α1 α2.
    pub g_t: f64,
    /// Input-referred system noise photons n_sys.
    pub n_sys: f64,
}

/// Bose-Einstein occupation 1/(exp(hf/kT) - 1); zero at T = 0.
pub fn thermal_occupation(frequency_hz: f64, temperature_k: f64) -> Result<f64> {
    if !(frequency_hz > 0.0) {
        return Err(Error::Domain("frequency must be positive".into()));
    }
    if temperature_k < 0.0 {
        return Err(Error::Domain("temperature must be >= 0".into()));
    }
    if temperature_k == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * crate::units::angular(frequency_hz) / (KB * temperature_k);
    Ok(1.0 / x.exp_m1())
}

/// Datasheet noise temperature (K) to added photons at `frequency_hz`,
/// using the linear convention n = k_B T / (h f).
pub fn noise_temperature_photons(t_noise_k: f64, frequency_hz: f64) -> Result<f64> {
    if !(frequency_hz > 0.0) {
        return Err(Error::Domain("frequency must be positive".into()));
    }
    if t_noise_k < 0.0 {
        return Err(Error::Domain("noise temperature must be >= 0".into()));
    }
    Ok(KB * t_noise_k / (HBAR * crate::units::angular(frequency_hz)))
}

/// Reduces the chain to its net gain G_T and system noise n_sys, with
/// attenuator occupations evaluated at `frequency_hz`.
pub fn chain_aggregate(chain: &DetectionChain, frequency_hz: f64) -> Result<ChainAggregate> {
    chain.validate()?;
    let n1 = thermal_occupation(frequency_hz, chain.t_stage1)?;
    let n2 = thermal_occupation(frequency_hz, chain.t_stage2)?;
    let g_t = chain.g_room * chain.g_hemt * chain.alpha1 * chain.alpha2;
    if g_t <= 1.0 {
        return Err(Error::Aggregation(format!(
            "net chain gain G_T = {g_t:.3e} must exceed 1"
        )));
    }
    let bracket = chain.alpha2 * (1.0 - chain.alpha1) * (n1 + 1.0)
        + (1.0 - chain.alpha2) * (n2 + 1.0)
        + (chain.g_hemt - 1.0) / chain.g_hemt * chain.n_hemt
        + (chain.g_room - 1.0) / (chain.g_room * chain.g_hemt) * chain.n_room;
    let n_sys = chain.g_room * chain.g_hemt / (g_t - 1.0) * bracket;
    Ok(ChainAggregate { g_t, n_sys })
}

/// Excess noise photons the amplifier itself adds, referred to its input.
///
/// Non-degenerate: (γ/κ)(|g_s+1|²/(|g_s|²-1))(2 n_th + 1).
/// Degenerate, amplified quadrature at pump phase `varphi_p`:
/// (γ/κ)(|g_s+1+g_i*|²/(|g_s+g_i*|²-1))(n_th + 1/2).
/// Band-center gains; κ enters through its real part.
pub fn kipa_excess_noise(params: &DpaParams, mode: Mode, n_th: f64, varphi_p: f64) -> Result<f64> {
    if n_th < 0.0 {
        return Err(Error::Domain("n_th must be >= 0".into()));
    }
    let ratio = params.gamma / params.kappa.re;
    match mode {
        Mode::NonDegenerate => {
            let g = signal_idler_gains(params, 0.0)?;
            let gain_excess = g.g_s.norm_sqr() - 1.0;
            if gain_excess <= 0.0 {
                return Err(Error::Singularity(
                    "non-degenerate gain does not exceed unity".into(),
                ));
            }
            Ok(ratio * (g.g_s + 1.0).norm_sqr() / gain_excess * (2.0 * n_th + 1.0))
        }
        Mode::Degenerate => {
            let phased = DpaParams {
                xi: Complex64::from_polar(params.xi.norm(), -varphi_p),
                ..*params
            };
            let g = signal_idler_gains(&phased, 0.0)?;
            let u = g.g_s + g.g_i.conj();
            let gain_excess = u.norm_sqr() - 1.0;
            if gain_excess <= 0.0 {
                return Err(Error::Singularity(
                    "degenerate quadrature gain does not exceed unity".into(),
                ));
            }
            Ok(ratio * (u + 1.0).norm_sqr() / gain_excess * (n_th + 0.5))
        }
    }
}

/// Input-referred total noise: the measured-path division and the model value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputReferredNoise {
    /// p_out / (z G_T G_k), when a measured power was supplied.
    pub measured: Option<f64>,
    /// Model prediction from the components.
    pub model: f64,
}

/// Input-referred noise photons for a configuration with amplifier power gain
/// `g_k`, chain conversion `z_g_t` = z·G_T, and noise components.
///
/// Degenerate model: (2n_th + 2n_k + 1)/4 + n_sys/G_k.
/// Non-degenerate model: (2n_th + n_k + 1) + n_sys/G_k.
pub fn input_referred_noise(
    p_out_watt: Option<f64>,
    z_g_t: f64,
    g_k: f64,
    mode: Mode,
    n_th: f64,
    n_k: f64,
    n_sys: f64,
) -> Result<InputReferredNoise> {
    if !(g_k > 1.0) {
        return Err(Error::Domain("g_k must exceed 1".into()));
    }
    if !(z_g_t > 0.0) {
        return Err(Error::Domain("z_g_t must be positive".into()));
    }
    if n_th < 0.0 || n_k < 0.0 || n_sys < 0.0 {
        return Err(Error::Domain("noise components must be >= 0".into()));
    }
    let model = match mode {
        Mode::Degenerate => 0.25 * (2.0 * n_th + 2.0 * n_k + 1.0) + n_sys / g_k,
        Mode::NonDegenerate => (2.0 * n_th + n_k + 1.0) + n_sys / g_k,
    };
    Ok(InputReferredNoise {
        measured: p_out_watt.map(|p| p / (z_g_t * g_k)),
        model,
    })
}

/// Predicted noise power at the analyzer for the amplifier off (`mode` None)
/// or on with band-center power gain `g_k` and zero-temperature excess `n_k0`.
///
/// The degenerate prediction keeps only the amplified quadrature.
pub fn predicted_power(
    chain: &DetectionChain,
    env: &Environment,
    g_k: f64,
    n_k0: f64,
    mode: Option<Mode>,
) -> Result<f64> {
    if g_k < 1.0 {
        return Err(Error::Domain("g_k must be >= 1".into()));
    }
    if n_k0 < 0.0 {
        return Err(Error::Domain("n_k0 must be >= 0".into()));
    }
    let agg = chain_aggregate(chain, env.frequency)?;
    let z = chain.z;
    let n_th = env.n_th;
    let downstream = z * (agg.g_t - 1.0) * (agg.n_sys + 0.5);
    Ok(match mode {
        None => z * agg.g_t * (n_th + 0.5) + downstream,
        Some(Mode::NonDegenerate) => {
            z * agg.g_t * g_k * (n_th + 0.5)
                + z * agg.g_t * (g_k - 1.0) * (n_th + n_k0 + 0.5)
                + downstream
        }
        Some(Mode::Degenerate) => {
            z * agg.g_t * g_k * (0.5 * n_th + 0.25)
                + z * agg.g_t * (g_k - 1.0) * (0.5 * n_k0)
                + downstream
        }
    })
}

/// Total input-referred noise with the amplifier off: n_th + 1/2 + n_sys.
pub fn off_total_noise(n_th: f64, n_sys: f64) -> f64 {
    n_th + 0.5 + n_sys
}

/// SNR gain of one configuration over another for the same coherent input:
/// 10 log10(n_reference / n_configuration).
pub fn snr_improvement(n_reference: f64, n_configuration: f64) -> f64 {
    crate::units::power_db(n_reference / n_configuration)
}

/// Complete on/off noise budget with every intermediate quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBudget {
    pub g_t: f64,
    pub n_sys: f64,
    pub n_th: f64,
    /// Band-center power gains actually used, linear.
    pub g_k_nondeg: f64,
    pub g_k_deg: f64,
    /// Zero-temperature excess noise of the amplifier, per mode.
    pub n_kn: f64,
    pub n_kd: f64,
    /// Input-referred totals, per mode.
    pub n_tn: f64,
    pub n_td: f64,
    /// Predicted analyzer powers (watt).
    pub p_out_nondeg: f64,
    pub p_out_deg: f64,
    pub p_out_off: f64,
}

/// Assembles the full budget from the model.
///
/// Gains default to the band-center model values (|g_s|² non-degenerate, the
/// squared phase-sensitive gain at `varphi_p` degenerate); pass overrides to
/// use measured gains instead. Excess noise is evaluated at zero temperature,
/// treating it as constant in temperature.
pub fn noise_budget(
    chain: &DetectionChain,
    params: &DpaParams,
    env: &Environment,
    varphi_p: f64,
    g_k_nondeg_override: Option<f64>,
    g_k_deg_override: Option<f64>,
) -> Result<NoiseBudget> {
    let agg = chain_aggregate(chain, env.frequency)?;
    let z_g_t = chain.z * agg.g_t;
    let g_k_nondeg = match g_k_nondeg_override {
        Some(g) => g,
        None => signal_idler_gains(params, 0.0)?.g_s.norm_sqr(),
    };
    let g_k_deg = match g_k_deg_override {
        Some(g) => g,
        None => phase_sensitive_gain(params, varphi_p)?.powi(2),
    };
    let n_kn = kipa_excess_noise(params, Mode::NonDegenerate, 0.0, varphi_p)?;
    let n_kd = kipa_excess_noise(params, Mode::Degenerate, 0.0, varphi_p)?;
    let n_tn = input_referred_noise(
        None,
        z_g_t,
        g_k_nondeg,
        Mode::NonDegenerate,
        env.n_th,
        n_kn,
        agg.n_sys,
    )?
    .model;
    let n_td = input_referred_noise(
        None,
        z_g_t,
        g_k_deg,
        Mode::Degenerate,
        env.n_th,
        n_kd,
        agg.n_sys,
    )?
    .model;
    Ok(NoiseBudget {
        g_t: agg.g_t,
        n_sys: agg.n_sys,
        n_th: env.n_th,
        g_k_nondeg,
        g_k_deg,
        n_kn,
        n_kd,
        n_tn,
        n_td,
        p_out_nondeg: predicted_power(chain, env, g_k_nondeg, n_kn, Some(Mode::NonDegenerate))?,
        p_out_deg: predicted_power(chain, env, g_k_deg, n_kd, Some(Mode::Degenerate))?,
        p_out_off: predicted_power(chain, env, 1.0, 0.0, None)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn thermal_occupation_cold_stage() {
        let n = thermal_occupation(7.1905e9, 0.02).unwrap();
        assert_relative_eq!(n, 3.2098e-8, max_relative = 1e-4);
    }

    #[test]
    fn thermal_occupation_warm_stage() {
        let n = thermal_occupation(7.2e9, 4.0).unwrap();
        assert_relative_eq!(n, 11.083, max_relative = 1e-3);
        assert_relative_eq!(n, 11.10, max_relative = 2e-3);
    }

    #[test]
    fn thermal_occupation_edge_cases() {
        assert_eq!(thermal_occupation(5e9, 0.0).unwrap(), 0.0);
        assert!(matches!(
            thermal_occupation(5e9, -0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            thermal_occupation(0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn noise_temperature_conversion() {
        let n = noise_temperature_photons(1.0, 7.1905e9).unwrap();
        assert_relative_eq!(n, 2.8977, max_relative = 1e-3);
    }

    fn example_chain() -> DetectionChain {
        DetectionChain {
            alpha1: 0.631,
            alpha2: 0.631,
            t_stage1: 0.02,
            t_stage2: 4.0,
            g_hemt: 1e4,
            g_room: 1e3,
            n_hemt: 10.0,
            n_room: 1000.0,
            z: 1e-19,
        }
    }

    #[test]
    fn chain_aggregate_example() {
        let agg = chain_aggregate(&example_chain(), 7.1905e9).unwrap();
        assert_relative_eq!(agg.g_t, 3.98161e6, max_relative = 1e-4);
        assert_relative_eq!(agg.n_sys, 37.1605, max_relative = 1e-3);
        assert_relative_eq!(agg.n_sys, 37.2, max_relative = 2e-3);
    }

    #[test]
    fn ideal_chain_adds_nothing() {
        let chain = DetectionChain {
            alpha1: 1.0,
            alpha2: 1.0,
            n_hemt: 0.0,
            n_room: 0.0,
            ..example_chain()
        };
        let agg = chain_aggregate(&chain, 7.1905e9).unwrap();
        assert_eq!(agg.n_sys, 0.0);
    }

    #[test]
    fn datasheet_style_chain() {
        // HEMT at 5.5 K and room amplifier at 300 K noise temperature, with
        // 1 dB and 3 dB of cold attenuation.
        let f = 7.1905e9;
        let chain = DetectionChain {
            alpha1: crate::units::transmittance(1.0),
            alpha2: crate::units::transmittance(3.0),
            t_stage1: 0.02,
            t_stage2: 4.0,
            g_hemt: 1e4,
            g_room: crate::units::db_power(45.0),
            n_hemt: noise_temperature_photons(5.5, f).unwrap(),
            n_room: noise_temperature_photons(300.0, f).unwrap(),
            z: 1e-19,
        };
        let agg = chain_aggregate(&chain, f).unwrap();
        assert_relative_eq!(agg.n_sys, 64.0, max_relative = 0.2);
    }

    #[test]
    fn chain_without_gain_is_rejected() {
        let chain = DetectionChain {
            g_hemt: 1.0,
            g_room: 1.0,
            alpha1: 0.5,
            alpha2: 0.5,
            ..example_chain()
        };
        assert!(matches!(
            chain_aggregate(&chain, 7.1905e9),
            Err(Error::Aggregation(_))
        ));
    }

    fn params(kappa_hz: f64, gamma_hz: f64, xi_hz: f64) -> DpaParams {
        DpaParams {
            kappa: num_complex::Complex64::new(angular(kappa_hz), 0.0),
            gamma: angular(gamma_hz),
            delta: 0.0,
            xi: num_complex::Complex64::new(angular(xi_hz), 0.0),
            kerr: -1.0,
            delta_dc: 0.0,
            delta_p: 0.0,
        }
    }

    /// Mixing strength giving band-center |g_s| = `amp` at Δ = 0.
    fn xi_for_gain(kappa_hz: f64, gamma_hz: f64, amp: f64) -> f64 {
        let kb = 0.5 * (kappa_hz + gamma_hz);
        (kb * kb - kappa_hz * kb / (amp + 1.0)).sqrt()
    }

    #[test]
    fn lossless_amplifier_adds_no_excess() {
        let p = params(53e6, 0.0, 17.2e6);
        let n = kipa_excess_noise(&p, Mode::NonDegenerate, 0.0, 0.0).unwrap();
        assert_eq!(n, 0.0);
        let n = kipa_excess_noise(&p, Mode::Degenerate, 0.0, 1.5 * PI).unwrap();
        assert_eq!(n, 0.0);
    }

    #[test]
    fn excess_noise_at_25_db_gain() {
        let xi = xi_for_gain(53e6, 71.905e3, crate::units::db_power(25.0f64).sqrt());
        let p = params(53e6, 71.905e3, xi);
        let n = kipa_excess_noise(&p, Mode::NonDegenerate, 0.0, 0.0).unwrap();
        assert!(n < 0.01, "n_kn0 = {n}");
        assert_relative_eq!(n, 1.5184e-3, max_relative = 1e-3);
    }

    #[test]
    fn degenerate_excess_is_half_at_high_gain() {
        let xi = xi_for_gain(53e6, 71.905e3, crate::units::db_power(40.0f64).sqrt());
        let p = params(53e6, 71.905e3, xi);
        let n_kn0 = kipa_excess_noise(&p, Mode::NonDegenerate, 0.0, 0.0).unwrap();
        let n_kd0 = kipa_excess_noise(&p, Mode::Degenerate, 0.0, 1.5 * PI).unwrap();
        assert_relative_eq!(n_kd0 / n_kn0, 0.5, max_relative = 0.05);
    }

    #[test]
    fn unity_gain_has_no_referred_excess() {
        let p = params(53e6, 71.905e3, 0.0);
        assert!(matches!(
            kipa_excess_noise(&p, Mode::NonDegenerate, 0.0, 0.0),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn quantum_limits() {
        let deg = input_referred_noise(None, 1e-13, 1e12, Mode::Degenerate, 0.0, 0.0, 80.0)
            .unwrap()
            .model;
        assert_relative_eq!(deg, 0.25, max_relative = 1e-9);
        let nondeg = input_referred_noise(None, 1e-13, 1e12, Mode::NonDegenerate, 0.0, 0.0, 80.0)
            .unwrap()
            .model;
        assert_relative_eq!(nondeg, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn nondegenerate_total_at_moderate_gain() {
        let n = input_referred_noise(
            None,
            1e-13,
            crate::units::db_power(24.5),
            Mode::NonDegenerate,
            0.0,
            0.18,
            80.0,
        )
        .unwrap()
        .model;
        assert_relative_eq!(n, 1.46385, max_relative = 1e-4);
    }

    #[test]
    fn measured_path_division() {
        let n = input_referred_noise(
            Some(9.32e-12),
            93.2e-15,
            100.0,
            Mode::NonDegenerate,
            0.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_relative_eq!(n.measured.unwrap(), 1.0, max_relative = 1e-12);
        assert!(matches!(
            input_referred_noise(None, 93.2e-15, 1.0, Mode::Degenerate, 0.0, 0.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    fn unity_coupled_chain() -> DetectionChain {
        DetectionChain {
            alpha1: 1.0,
            alpha2: 1.0,
            t_stage1: 0.0,
            t_stage2: 0.0,
            g_hemt: 1e4,
            g_room: 100.0,
            n_hemt: 0.0,
            n_room: 0.0,
            z: 9.32e-20,
        }
    }

    #[test]
    fn on_off_power_difference() {
        let chain = unity_coupled_chain();
        let env = Environment::new(7.1905e9, 0.0).unwrap();
        let p_on = predicted_power(&chain, &env, 100.0, 0.0, Some(Mode::NonDegenerate)).unwrap();
        let p_off = predicted_power(&chain, &env, 1.0, 0.0, None).unwrap();
        assert_relative_eq!(p_on - p_off, 9.2268e-12, max_relative = 1e-4);
    }

    #[test]
    fn power_on_off_consistency_at_unity_gain() {
        let chain = example_chain();
        let env = Environment::new(7.1905e9, 0.1).unwrap();
        let on = predicted_power(&chain, &env, 1.0, 0.3, Some(Mode::NonDegenerate)).unwrap();
        let off = predicted_power(&chain, &env, 1.0, 0.0, None).unwrap();
        assert_relative_eq!(on, off, max_relative = 1e-12);
    }

    #[test]
    fn snr_improvements() {
        assert_eq!(snr_improvement(1.46, 1.46), 0.0);
        let snr = snr_improvement(off_total_noise(0.0, 80.0), 1.46385);
        assert_relative_eq!(snr, 17.403, max_relative = 1e-3);
    }

    #[test]
    fn budget_assembles_every_intermediate() {
        let chain = example_chain();
        let env = Environment::new(7.1905e9, 0.02).unwrap();
        let xi = xi_for_gain(53e6, 71.905e3, crate::units::db_power(20.0f64).sqrt());
        let p = params(53e6, 71.905e3, xi);
        let b = noise_budget(&chain, &p, &env, 1.5 * PI, None, None).unwrap();
        assert_relative_eq!(b.g_k_nondeg, 100.0, max_relative = 1e-9);
        assert!(b.g_k_deg > b.g_k_nondeg);
        assert!(b.n_kd < b.n_kn && b.n_kn > 0.0);
        assert!(b.n_td < b.n_tn);
        assert!(b.p_out_nondeg > b.p_out_off && b.p_out_deg > b.p_out_off);
        let b2 = noise_budget(&chain, &p, &env, 1.5 * PI, Some(50.0), None).unwrap();
        assert_relative_eq!(b2.g_k_nondeg, 50.0, max_relative = 1e-12);
        assert!(b2.n_tn > b.n_tn);
    }
}
