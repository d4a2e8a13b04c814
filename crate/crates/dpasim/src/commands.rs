//! One function per subcommand, each mapping the resolved configuration to a
//! library call and packaging the numbers for emission.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use dpa::circuit::{derive_dpa_params, DpaParams};
use dpa::fitting::{
    calibrate_conversion, compression_point, fit_gain_spectrum, fit_gain_spectrum_from, fit_istar,
    fit_noise_asymptote, CalibrationSweep, Compression, FitResult, Trace,
};
use dpa::iotheory::{phase_sensitive_gain, reflection_gain, threshold_pump_power};
use dpa::noisechain::{noise_budget, off_total_noise, snr_improvement, thermal_occupation};
use dpa::squeezing::{
    antisqueezing_maximum, ellipse_sweep, extract_gs_ga, vacuum_squeezing_minimum, QuadraturePoint,
};
use dpa::units::{angular, cyclic, power_db};

use crate::config::Resolved;
use crate::table::Output;
use crate::CliError;

pub const DEFAULT_SPAN_HZ: f64 = 400e6;
pub const DEFAULT_SPECTRUM_POINTS: usize = 1001;
pub const DEFAULT_PHASE_POINTS: usize = 361;
pub const DEFAULT_ELLIPSE_POINTS: usize = 360;

/// Model parameters for the resolved operating point.
pub fn derive_params(resolved: &Resolved) -> Result<DpaParams, CliError> {
    derive_dpa_params(&resolved.device, &resolved.drive, resolved.kappa()).map_err(CliError::from)
}

pub fn gain_spectrum(
    resolved: &Resolved,
    span: Option<f64>,
    points: Option<usize>,
) -> Result<Output, CliError> {
    let span = span.unwrap_or(DEFAULT_SPAN_HZ);
    let points = points.unwrap_or(DEFAULT_SPECTRUM_POINTS);
    if !(span > 0.0) {
        return Err(CliError::Config("span must be positive".into()));
    }
    if points < 2 {
        return Err(CliError::Config("points must be at least 2".into()));
    }
    let params = derive_params(resolved)?;
    let omega_p = resolved.drive.omega_p;
    let center = cyclic(0.5 * omega_p);
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let f = center - 0.5 * span + span * k as f64 / (points - 1) as f64;
        let gamma = reflection_gain(&params, angular(f), omega_p)?;
        rows.push(vec![f, 20.0 * gamma.norm().log10(), gamma.arg()]);
    }
    Ok(Output::Table {
        columns: vec!["freq_hz", "gain_db", "phase_rad"],
        rows,
    })
}

pub fn phase_gain(resolved: &Resolved, points: Option<usize>) -> Result<Output, CliError> {
    let points = points.unwrap_or(DEFAULT_PHASE_POINTS);
    if points < 2 {
        return Err(CliError::Config("points must be at least 2".into()));
    }
    let params = derive_params(resolved)?;
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let phi = TAU * k as f64 / (points - 1) as f64;
        let amp = phase_sensitive_gain(&params, phi)?;
        rows.push(vec![phi, 20.0 * amp.log10()]);
    }
    Ok(Output::Table {
        columns: vec!["varphi_p_rad", "gain_db"],
        rows,
    })
}

pub struct EllipsePair {
    pub on: Vec<QuadraturePoint>,
    pub off: Vec<QuadraturePoint>,
}

/// Quadrature ellipses with the pump on and off at the configured phase.
pub fn ellipse_points(resolved: &Resolved, points: usize) -> Result<EllipsePair, CliError> {
    let params = derive_params(resolved)?;
    let off_params = DpaParams {
        xi: Complex64::new(0.0, 0.0),
        ..params
    };
    let varphi_p = resolved.drive.varphi_p;
    let on = ellipse_sweep(&params, varphi_p, &resolved.reflection, 1.0, points)?;
    let off = ellipse_sweep(&off_params, varphi_p, &resolved.reflection, 1.0, points)?;
    Ok(EllipsePair { on, off })
}

pub fn ellipse(resolved: &Resolved, points: Option<usize>) -> Result<Output, CliError> {
    let points = points.unwrap_or(DEFAULT_ELLIPSE_POINTS);
    let pair = ellipse_points(resolved, points)?;
    let rows = (0..points)
        .map(|k| {
            vec![
                TAU * k as f64 / points as f64,
                pair.on[k].i,
                pair.on[k].q,
                pair.off[k].i,
                pair.off[k].q,
            ]
        })
        .collect();
    Ok(Output::Table {
        columns: vec!["theta_rad", "i_on", "q_on", "i_off", "q_off"],
        rows,
    })
}

pub struct SqueezeBudget {
    pub vac_min_db: f64,
    pub vac_min_phase_rad: f64,
    pub anti_max_db: f64,
    pub anti_max_phase_rad: f64,
    pub plateau_db: f64,
}

/// Vacuum squeezing extremes at the operating point, plus the plateau the
/// minimum approaches as the drive nears threshold.
pub fn squeeze_budget_values(resolved: &Resolved) -> Result<SqueezeBudget, CliError> {
    let params = derive_params(resolved)?;
    let min = vacuum_squeezing_minimum(&params)?;
    let max = antisqueezing_maximum(&params)?;
    let kb = 0.5 * (params.kappa.re + params.gamma);
    let near_threshold = DpaParams {
        xi: Complex64::new(kb * (1.0 - 1e-9), 0.0),
        ..params
    };
    let plateau = vacuum_squeezing_minimum(&near_threshold)?;
    Ok(SqueezeBudget {
        vac_min_db: min.level_db,
        vac_min_phase_rad: min.varphi_p,
        anti_max_db: max.level_db,
        anti_max_phase_rad: max.varphi_p,
        plateau_db: plateau.level_db,
    })
}

pub fn squeeze_budget(resolved: &Resolved) -> Result<Output, CliError> {
    let b = squeeze_budget_values(resolved)?;
    Ok(Output::Table {
        columns: vec![
            "vac_min_db",
            "vac_min_phase_rad",
            "anti_max_db",
            "anti_max_phase_rad",
            "plateau_db",
        ],
        rows: vec![vec![
            b.vac_min_db,
            b.vac_min_phase_rad,
            b.anti_max_db,
            b.anti_max_phase_rad,
            b.plateau_db,
        ]],
    })
}

pub const NOISE_BUDGET_COLUMNS: [&str; 14] = [
    "g_t_db",
    "n_sys",
    "n_th",
    "g_k_nondeg_db",
    "g_k_deg_db",
    "n_kn",
    "n_kd",
    "n_tn",
    "n_td",
    "snr_nondeg_db",
    "snr_deg_db",
    "p_out_nondeg_w",
    "p_out_deg_w",
    "p_out_off_w",
];

pub fn noise_budget_row(resolved: &Resolved) -> Result<Vec<f64>, CliError> {
    let chain = resolved.chain()?;
    let env = resolved.environment()?;
    let params = derive_params(resolved)?;
    let budget = noise_budget(
        chain,
        &params,
        env,
        resolved.drive.varphi_p,
        resolved.g_k_nondeg,
        resolved.g_k_deg,
    )?;
    let n_off = off_total_noise(budget.n_th, budget.n_sys);
    Ok(vec![
        power_db(budget.g_t),
        budget.n_sys,
        budget.n_th,
        power_db(budget.g_k_nondeg),
        power_db(budget.g_k_deg),
        budget.n_kn,
        budget.n_kd,
        budget.n_tn,
        budget.n_td,
        snr_improvement(n_off, budget.n_tn),
        snr_improvement(n_off, budget.n_td),
        budget.p_out_nondeg,
        budget.p_out_deg,
        budget.p_out_off,
    ])
}

pub fn noise_budget_cmd(resolved: &Resolved) -> Result<Output, CliError> {
    Ok(Output::Table {
        columns: NOISE_BUDGET_COLUMNS.to_vec(),
        rows: vec![noise_budget_row(resolved)?],
    })
}

pub fn threshold(resolved: &Resolved) -> Result<Output, CliError> {
    let flat;
    let table: &[(f64, f64)] = match &resolved.kappa_table {
        Some(t) => t,
        None => match resolved.kappa_fixed {
            Some(k) => {
                flat = [(-30.0, k.re), (20.0, k.re)];
                &flat
            }
            None => {
                return Err(CliError::Config(
                    "threshold needs a kappa_table or a fixed kappa_mhz".into(),
                ))
            }
        },
    };
    let dbm = threshold_pump_power(&resolved.device, &resolved.drive, table)?;
    Ok(Output::Table {
        columns: vec!["threshold_dbm"],
        rows: vec![vec![dbm]],
    })
}

/// Columns of a data file, keyed by a lowercase header.
pub struct DataFile {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl DataFile {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::Config(format!("cannot read data {}: {e}", path.display())))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::Config(format!("data header: {e}")))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        if header.is_empty() {
            return Err(CliError::Config("data file has no header".into()));
        }
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for (i, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| CliError::Config(format!("data row {}: {e}", i + 2)))?;
            if record.len() != header.len() {
                return Err(CliError::Config(format!(
                    "data row {}: expected {} fields, found {}",
                    i + 2,
                    header.len(),
                    record.len()
                )));
            }
            for (j, cell) in record.iter().enumerate() {
                let value: f64 = cell.parse().map_err(|_| {
                    CliError::Config(format!("data row {}: bad number {cell:?}", i + 2))
                })?;
                columns[j].push(value);
            }
        }
        if columns[0].is_empty() {
            return Err(CliError::Config("data file has no rows".into()));
        }
        Ok(DataFile { header, columns })
    }

    fn take(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.columns[idx].clone())
    }
}

fn fit_record(kind: &str, fit: &FitResult) -> Output {
    let uncertainties: Vec<f64> = fit
        .names
        .iter()
        .map(|n| fit.uncertainty(n).unwrap_or(0.0))
        .collect();
    Output::Record(vec![
        ("kind", json!(kind)),
        ("names", json!(fit.names)),
        ("values", json!(fit.values)),
        ("uncertainties", json!(uncertainties)),
        ("covariance", json!(fit.covariance)),
        ("residual_rms", json!(fit.residual_rms)),
        ("n_iterations", json!(fit.n_iterations)),
    ])
}

/// Dispatches on the data header: frequency spectra fit the coupling and
/// attenuation, bias sweeps fit the scale current, gain-versus-signal-power
/// sweeps locate compression, gain-versus-noise sweeps fit the asymptote.
pub fn fit(resolved: &Resolved, data: &DataFile, seed: Option<u64>) -> Result<Output, CliError> {
    let has = |name: &str| data.header.iter().any(|h| h == name);
    if has("freq_hz") && has("gain_db") {
        let x = data.take("freq_hz").expect("checked");
        let y = data.take("gain_db").expect("checked");
        let sigma = data.take("sigma_db");
        let trace = Trace::new(x, y, sigma)?;
        let fit = match seed {
            None => fit_gain_spectrum(&trace, &resolved.device, &resolved.drive)?,
            Some(seed) => gain_fit_with_restarts(resolved, &trace, seed)?,
        };
        return Ok(fit_record("gain-spectrum", &fit));
    }
    if has("bias_a") && has("freq_hz") {
        let trace = Trace::new(
            data.take("bias_a").expect("checked"),
            data.take("freq_hz").expect("checked"),
            None,
        )?;
        return Ok(fit_record("bias-sweep", &fit_istar(&trace)?));
    }
    if has("sigpow_dbm") && has("gain_db") {
        let trace = Trace::new(
            data.take("sigpow_dbm").expect("checked"),
            data.take("gain_db").expect("checked"),
            None,
        )?;
        let record = match compression_point(&trace)? {
            Compression::Saturated {
                p_in_dbm,
                p_out_dbm,
                g0_db,
            } => vec![
                ("kind", json!("compression")),
                ("saturated", json!(true)),
                ("g0_db", json!(g0_db)),
                ("p_in_dbm", json!(p_in_dbm)),
                ("p_out_dbm", json!(p_out_dbm)),
            ],
            Compression::NotSaturated { g0_db } => vec![
                ("kind", json!("compression")),
                ("saturated", json!(false)),
                ("g0_db", json!(g0_db)),
            ],
        };
        return Ok(Output::Record(record));
    }
    if has("gain_linear") && has("n_t_photons") {
        let trace = Trace::new(
            data.take("gain_linear").expect("checked"),
            data.take("n_t_photons").expect("checked"),
            None,
        )?;
        return Ok(fit_record("noise-asymptote", &fit_noise_asymptote(&trace)?));
    }
    Err(CliError::Config(format!(
        "unrecognized data header {:?}; expected freq_hz+gain_db, bias_a+freq_hz, \
         sigpow_dbm+gain_db, or gain_linear+n_t_photons",
        data.header
    )))
}

/// Seeded Monte-Carlo restarts of the spectrum fit: the default start plus
/// eight jittered ones, keeping the converged result with the lowest rms.
fn gain_fit_with_restarts(
    resolved: &Resolved,
    trace: &Trace,
    seed: u64,
) -> Result<FitResult, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = fit_gain_spectrum(trace, &resolved.device, &resolved.drive);
    let kappa_scale = match &base {
        Ok(fit) => fit.value("kappa_abs_hz").expect("named"),
        Err(_) => (trace.x()[trace.len() - 1] - trace.x()[0]) / 4.0,
    };
    let mut best: Option<FitResult> = base.ok();
    for _ in 0..8 {
        let x0 = [
            kappa_scale * (0.5 + rng.random::<f64>()),
            0.2 * (rng.random::<f64>() - 0.5),
            25.0 + 4.0 * (rng.random::<f64>() - 0.5),
        ];
        let Ok(fit) = fit_gain_spectrum_from(trace, &resolved.device, &resolved.drive, x0) else {
            continue;
        };
        let better = match &best {
            Some(b) => fit.residual_rms < b.residual_rms,
            None => true,
        };
        if better {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| {
        CliError::Model(dpa::Error::Fit {
            message: "no restart of the gain-spectrum fit converged".into(),
            best: None,
        })
    })
}

pub fn calibrate(resolved: &Resolved, data: &DataFile) -> Result<Output, CliError> {
    let env = resolved.environment()?;
    let expected = ["temp_k", "gain_linear", "p_on_w", "p_off_w"];
    if data.header != expected {
        return Err(CliError::Config(format!(
            "calibrate expects header {expected:?}, found {:?}",
            data.header
        )));
    }
    let temp = &data.columns[0];
    let gain = &data.columns[1];
    let p_on = &data.columns[2];
    let p_off = &data.columns[3];
    // Group rows into per-gain sweeps, keeping first-appearance order.
    let mut sweeps: Vec<CalibrationSweep> = Vec::new();
    for i in 0..temp.len() {
        let n_th = thermal_occupation(env.frequency, temp[i])?;
        let delta = p_on[i] - p_off[i];
        match sweeps.iter_mut().find(|s| s.gain_linear == gain[i]) {
            Some(sweep) => {
                sweep.n_th.push(n_th);
                sweep.p_delta.push(delta);
            }
            None => sweeps.push(CalibrationSweep {
                gain_linear: gain[i],
                n_th: vec![n_th],
                p_delta: vec![delta],
            }),
        }
    }
    let result = calibrate_conversion(&sweeps)?;
    Ok(Output::Record(vec![
        ("kind", json!("calibration")),
        ("z_g_t_w_per_photon", json!(result.z_g_t)),
        ("z_g_t_fw_per_photon", json!(result.z_g_t * 1e15)),
        ("z_g_t_sigma_w_per_photon", json!(result.z_g_t_sigma)),
        ("slopes_w_per_photon", json!(result.slopes)),
        ("residual_rms_w", json!(result.residual_rms)),
    ]))
}

/// Summary used by sweeps: area and amplitude extremes of the on-ellipse plus
/// the extracted quadrature gains.
pub fn ellipse_summary(resolved: &Resolved, points: usize) -> Result<Vec<f64>, CliError> {
    let pair = ellipse_points(resolved, points)?;
    let (mut r_max, mut r_min) = (0.0f64, f64::INFINITY);
    for p in &pair.on {
        let r = p.i.hypot(p.q);
        r_max = r_max.max(r);
        r_min = r_min.min(r);
    }
    let mut area = 0.0;
    for k in 0..pair.on.len() {
        let a = &pair.on[k];
        let b = &pair.on[(k + 1) % pair.on.len()];
        area += a.i * b.q - b.i * a.q;
    }
    let gains = extract_gs_ga(&pair.on, &pair.off)?;
    Ok(vec![
        r_max,
        r_min,
        0.5 * area.abs(),
        gains.g_a_db,
        gains.g_s_db,
    ])
}
