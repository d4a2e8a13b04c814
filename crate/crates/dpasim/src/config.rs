//! Run configuration: JSON schema with unit-suffixed field names, resolution
//! into model types, and a canonical hash for output provenance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use dpa::circuit::{DriveCondition, FilmDevice};
use dpa::noisechain::{DetectionChain, Environment};
use dpa::squeezing::ReflectionModel;
use dpa::units::{angular, db_power, transmittance};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub drive: DriveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflection: Option<ReflectionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_table: Option<Vec<KappaPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub l_total_nh: f64,
    pub i_star_ma: f64,
    pub f0_ghz: f64,
    pub z0_ohm: f64,
    pub q_internal: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_arg_rad: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub i_dc_ma: f64,
    pub p_pump_dbm: f64,
    pub lambda_p_db: f64,
    pub f_p_ghz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varphi_p_rad: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub frequency_ghz: f64,
    pub temperature_k: f64,
}

/// Detection chain between the device and the analyzer: two attenuators at
/// their stage temperatures, then the cold and room-temperature amplifiers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub alpha1_db: f64,
    pub alpha2_db: f64,
    pub t_stage1_k: f64,
    pub t_stage2_k: f64,
    pub g_hemt_db: f64,
    pub g_room_db: f64,
    pub n_hemt_photons: f64,
    pub n_room_photons: f64,
    pub z_fw_per_photon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionConfig {
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_rad: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaPoint {
    pub p_pump_dbm: f64,
    pub kappa_mhz: f64,
}

/// Measured band-center gains overriding the model values in noise budgets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_k_nondeg_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_k_deg_db: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        config.normalize();
        Ok(config)
    }

    /// Fills defaulted fields so the serialized form is canonical.
    fn normalize(&mut self) {
        self.drive.varphi_p_rad.get_or_insert(0.0);
        if self.device.kappa_mhz.is_some() {
            self.device.kappa_arg_rad.get_or_insert(0.0);
        }
        if let Some(r) = &mut self.reflection {
            r.phi_rad.get_or_insert(0.0);
        }
    }

    /// SHA-256 of the canonical (normalized, compact) JSON form.
    pub fn sha256(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let device = FilmDevice {
            l_total: self.device.l_total_nh * 1e-9,
            i_star: self.device.i_star_ma * 1e-3,
            omega0: angular(self.device.f0_ghz * 1e9),
            z0: self.device.z0_ohm,
            q_internal: self.device.q_internal,
            q_coupling: self.device.q_coupling,
        };
        device.validate().map_err(config_err)?;
        let drive = DriveCondition {
            i_dc: self.drive.i_dc_ma * 1e-3,
            p_pump_dbm: self.drive.p_pump_dbm,
            lambda_p_db: self.drive.lambda_p_db,
            omega_p: angular(self.drive.f_p_ghz * 1e9),
            varphi_p: self.drive.varphi_p_rad.unwrap_or(0.0),
        };
        drive.validate().map_err(config_err)?;

        let environment = match &self.environment {
            Some(e) => {
                Some(Environment::new(e.frequency_ghz * 1e9, e.temperature_k).map_err(config_err)?)
            }
            None => None,
        };
        let chain = match &self.chain {
            Some(c) => {
                let chain = DetectionChain {
                    alpha1: transmittance(c.alpha1_db),
                    alpha2: transmittance(c.alpha2_db),
                    t_stage1: c.t_stage1_k,
                    t_stage2: c.t_stage2_k,
                    g_hemt: db_power(c.g_hemt_db),
                    g_room: db_power(c.g_room_db),
                    n_hemt: c.n_hemt_photons,
                    n_room: c.n_room_photons,
                    z: c.z_fw_per_photon * 1e-15,
                };
                chain.validate().map_err(config_err)?;
                Some(chain)
            }
            None => None,
        };
        let reflection = match &self.reflection {
            Some(r) => ReflectionModel::new(r.r, r.phi_rad.unwrap_or(0.0)).map_err(config_err)?,
            None => ReflectionModel::none(),
        };
        let kappa_table = match &self.kappa_table {
            Some(rows) => {
                if rows.len() < 2 {
                    return Err(CliError::Config(
                        "kappa_table needs at least two rows".into(),
                    ));
                }
                let table: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.p_pump_dbm, angular(r.kappa_mhz * 1e6)))
                    .collect();
                if !table.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(CliError::Config(
                        "kappa_table must be strictly increasing in p_pump_dbm".into(),
                    ));
                }
                Some(table)
            }
            None => None,
        };
        Ok(Resolved {
            device,
            drive,
            kappa_fixed: self.device.kappa_mhz.map(|k| {
                Complex64::from_polar(angular(k * 1e6), self.device.kappa_arg_rad.unwrap_or(0.0))
            }),
            environment,
            chain,
            reflection,
            kappa_table,
            g_k_nondeg: self
                .budget
                .as_ref()
                .and_then(|b| b.g_k_nondeg_db)
                .map(db_power),
            g_k_deg: self
                .budget
                .as_ref()
                .and_then(|b| b.g_k_deg_db)
                .map(db_power),
        })
    }
}

fn config_err(e: dpa::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Configuration converted to model types (SI units, angular frequencies).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub device: FilmDevice,
    pub drive: DriveCondition,
    pub kappa_fixed: Option<Complex64>,
    pub environment: Option<Environment>,
    pub chain: Option<DetectionChain>,
    pub reflection: ReflectionModel,
    /// Pump power (dBm) versus coupling rate (rad/s), increasing in power.
    pub kappa_table: Option<Vec<(f64, f64)>>,
    pub g_k_nondeg: Option<f64>,
    pub g_k_deg: Option<f64>,
}

impl Resolved {
    /// Coupling rate for the current drive power: the fixed value if given,
    /// otherwise the power table interpolated (clamped at its ends).
    pub fn kappa(&self) -> Option<Complex64> {
        if self.kappa_fixed.is_some() {
            return self.kappa_fixed;
        }
        let table = self.kappa_table.as_ref()?;
        let p = self.drive.p_pump_dbm;
        let first = table[0];
        let last = table[table.len() - 1];
        if p <= first.0 {
            return Some(Complex64::new(first.1, 0.0));
        }
        if p >= last.0 {
            return Some(Complex64::new(last.1, 0.0));
        }
        let w = table
            .windows(2)
            .find(|w| p <= w[1].0)
            .expect("p inside table");
        let t = (p - w[0].0) / (w[1].0 - w[0].0);
        Some(Complex64::new(w[0].1 + t * (w[1].1 - w[0].1), 0.0))
    }

    pub fn environment(&self) -> Result<&Environment, CliError> {
        self.environment
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs an environment section".into()))
    }

    pub fn chain(&self) -> Result<&DetectionChain, CliError> {
        self.chain
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a chain section".into()))
    }
}
