//! Parameter extraction from measured traces: reflection-gain spectra, bias
//! sweeps of the resonance, power calibrations, noise asymptotes, and gain
//! compression.

mod lm;

use num_complex::Complex64;

use crate::circuit::{derive_dpa_params, DriveCondition, FilmDevice};
use crate::error::{Error, Result};
use crate::iotheory::{gain_bandwidth_product, oscillation_margin, reflection_gamma_rot, Spectrum};
use crate::units::{amplitude_db, angular};

/// A measured 1-D sweep with optional per-point uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    x: Vec<f64>,
    y: Vec<f64>,
    sigma: Option<Vec<f64>>,
}

impl Trace {
    /// Requires finite values, matching lengths, and positive uncertainties
    /// when given. Points are sorted by the axis, so fits are invariant under
    /// reordering of the input.
    pub fn new(x: Vec<f64>, y: Vec<f64>, sigma: Option<Vec<f64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Domain(
                "trace axis and values differ in length".into(),
            ));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("trace contains non-finite values".into()));
        }
        if let Some(s) = &sigma {
            if s.len() != x.len() {
                return Err(Error::Domain("uncertainty length mismatch".into()));
            }
            if s.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::Domain("uncertainties must be positive".into()));
            }
        }
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap());
        let sigma = sigma.map(|s| order.iter().map(|&i| s[i]).collect());
        Ok(Self {
            x: order.iter().map(|&i| x[i]).collect(),
            y: order.iter().map(|&i| y[i]).collect(),
            sigma,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sigma(&self) -> Option<&[f64]> {
        self.sigma.as_deref()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Converged fit: named parameter estimates with covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub residual_rms: f64,
    pub n_iterations: usize,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.values[i])
    }

    /// One-sigma uncertainty from the covariance diagonal.
    pub fn uncertainty(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.covariance[i][i].max(0.0).sqrt())
    }
}

fn fit_error(message: impl Into<String>, best: Option<FitResult>) -> Error {
    Error::Fit {
        message: message.into(),
        best: best.map(Box::new),
    }
}

/// Softplus with slope `k`, kept overflow-safe.
fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z
    } else {
        z.exp().ln_1p()
    }
}

/// Fits coupling magnitude, coupling phase, and pump-line attenuation to a
/// reflection-gain spectrum (dB versus lab frequency in Hz).
///
/// Free parameters: `kappa_abs_hz` (coupling rate, cyclic Hz), `kappa_arg_rad`
/// (its phase), `lambda_p_db`. Everything else comes from `device` and
/// `drive`. A soft barrier on the oscillation margin keeps iterates below
/// threshold.
pub fn fit_gain_spectrum(
    trace: &Trace,
    device: &FilmDevice,
    drive: &DriveCondition,
) -> Result<FitResult> {
    if trace.len() < 4 {
        return Err(Error::DegenerateInput(
            "gain fit needs at least 4 spectrum points".into(),
        ));
    }
    let span = trace.x[trace.x.len() - 1] - trace.x[0];
    // Coupling starts from the peak's gain-bandwidth product (amplitude times
    // -3 dB width), which tracks |κ| across gains; attenuation from 25 dB.
    let kappa_init = Spectrum::new(trace.x.clone(), trace.y.clone())
        .ok()
        .and_then(|s| gain_bandwidth_product(&s).ok())
        .map(|gb| gb.gbp_hz)
        .unwrap_or(span / 4.0);
    fit_gain_spectrum_from(trace, device, drive, [kappa_init, 0.0, 25.0])
}

/// [`fit_gain_spectrum`] started from an explicit guess
/// `[kappa_abs_hz, kappa_arg_rad, lambda_p_db]`, for restart strategies.
pub fn fit_gain_spectrum_from(
    trace: &Trace,
    device: &FilmDevice,
    drive: &DriveCondition,
    x0: [f64; 3],
) -> Result<FitResult> {
    if trace.len() < 4 {
        return Err(Error::DegenerateInput(
            "gain fit needs at least 4 spectrum points".into(),
        ));
    }
    let names = ["kappa_abs_hz", "kappa_arg_rad", "lambda_p_db"];

    let device = *device;
    let drive_base = *drive;
    let xs = trace.x.clone();
    let ys = trace.y.clone();
    let sigma = trace.sigma.clone();
    let whitened = sigma.is_some();
    let model_db = move |p: &[f64]| -> Option<Vec<f64>> {
        let kappa = Complex64::from_polar(angular(p[0]), p[1]);
        let drive = DriveCondition {
            lambda_p_db: p[2],
            ..drive_base
        };
        let params = derive_dpa_params(&device, &drive, Some(kappa)).ok()?;
        let margin = oscillation_margin(&params);
        let barrier = 10.0 * softplus(2000.0 * margin);
        let mut out: Vec<f64> = xs
            .iter()
            .map(|&f| {
                let w_rot = angular(f) - 0.5 * drive_base.omega_p;
                amplitude_db(reflection_gamma_rot(&params, w_rot).norm())
            })
            .collect();
        out.push(barrier);
        Some(out)
    };

    let ys_res = ys.clone();
    let sigma_res = sigma.clone();
    let residuals = move |p: &[f64]| -> Vec<f64> {
        match model_db(p) {
            Some(mut m) => {
                for (i, v) in m.iter_mut().enumerate().take(ys_res.len()) {
                    *v -= ys_res[i];
                    if let Some(s) = &sigma_res {
                        *v /= s[i];
                    }
                }
                m
            }
            None => vec![1e6; ys_res.len() + 1],
        }
    };

    let out = lm::minimize(&residuals, &x0, &lm::LmOptions::default());

    // Unweighted rms over the data rows only.
    let raw = residuals(&out.x);
    let m_data = ys.len();
    let rms = (raw[..m_data]
        .iter()
        .zip(
            sigma
                .as_deref()
                .unwrap_or(&[])
                .iter()
                .chain(std::iter::repeat(&1.0)),
        )
        .map(|(r, s)| (r * s).powi(2))
        .sum::<f64>()
        / m_data as f64)
        .sqrt();
    let cov =
        lm::covariance(&out.jacobian, out.cost, whitened).unwrap_or_else(|| vec![vec![0.0; 3]; 3]);
    let result = FitResult {
        names: names.iter().map(|s| s.to_string()).collect(),
        values: out.x.clone(),
        covariance: cov,
        residual_rms: rms,
        n_iterations: out.n_iterations,
    };
    if !out.converged {
        return Err(fit_error(
            "gain-spectrum fit did not converge",
            Some(result),
        ));
    }
    Ok(result)
}

fn count_distinct(sorted: &[f64]) -> usize {
    let mut n = if sorted.is_empty() { 0 } else { 1 };
    for w in sorted.windows(2) {
        let scale = w[0].abs().max(w[1].abs()).max(1e-300);
        if (w[1] - w[0]).abs() / scale > 1e-12 {
            n += 1;
        }
    }
    n
}

/// Fits the bias dependence of the resonance frequency,
/// f_r = f0 + b·I² + c·I⁴, and reports f0, the scale current
/// I* = sqrt(-f0/(2b)), and the quartic nuisance coefficient.
///
/// `trace`: bias current (A) versus resonance frequency (Hz).
pub fn fit_istar(trace: &Trace) -> Result<FitResult> {
    let u: Vec<f64> = trace.x.iter().map(|i| i * i).collect();
    let mut u_sorted = u.clone();
    u_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if count_distinct(&u_sorted) < 4 {
        return Err(fit_error(
            "bias sweep needs at least 4 distinct squared-bias values",
            None,
        ));
    }
    let design: Vec<Vec<f64>> = u.iter().map(|&ui| vec![1.0, ui, ui * ui]).collect();
    let (beta, inv, ssr) = lm::linear_lstsq(&design, &trace.y)
        .ok_or_else(|| fit_error("bias-sweep design matrix is singular", None))?;
    let (a, b, c) = (beta[0], beta[1], beta[2]);
    if !(a > 0.0) || b >= 0.0 {
        return Err(fit_error(
            format!("bias dependence must soften a positive resonance (f0 = {a:.4e} Hz, quadratic coefficient = {b:.4e})"),
            None,
        ));
    }
    let i_star = (-a / (2.0 * b)).sqrt();
    let m = trace.len();
    let sigma2 = if m > 3 { ssr / (m - 3) as f64 } else { 0.0 };
    let cov_beta: Vec<Vec<f64>> = inv
        .iter()
        .map(|row| row.iter().map(|v| v * sigma2).collect())
        .collect();
    // Propagate (a, b, c) -> (f0, I*, c).
    let di_da = -1.0 / (4.0 * b * i_star);
    let di_db = a / (4.0 * b * b * i_star);
    let t = [[1.0, 0.0, 0.0], [di_da, di_db, 0.0], [0.0, 0.0, 1.0]];
    let mut cov = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for p in 0..3 {
                for q in 0..3 {
                    acc += t[i][p] * cov_beta[p][q] * t[j][q];
                }
            }
            cov[i][j] = acc;
        }
    }
    Ok(FitResult {
        names: vec![
            "f0_hz".to_string(),
            "i_star_a".to_string(),
            "quartic_hz_per_a4".to_string(),
        ],
        values: vec![a, i_star, c],
        covariance: cov,
        residual_rms: (ssr / m as f64).sqrt(),
        n_iterations: 1,
    })
}

/// Fits n_t(G_k) = n_infinity + n_sys/G_k to an input-referred noise sweep.
///
/// `trace`: amplifier power gain (linear) versus noise photons.
pub fn fit_noise_asymptote(trace: &Trace) -> Result<FitResult> {
    if trace.len() < 3 {
        return Err(Error::DegenerateInput(
            "noise asymptote fit needs at least 3 gain points".into(),
        ));
    }
    if trace.x.iter().any(|&g| g <= 0.0) {
        return Err(Error::Domain("gains must be positive".into()));
    }
    let design: Vec<Vec<f64>> = trace.x.iter().map(|&g| vec![1.0, 1.0 / g]).collect();
    let (beta, inv, ssr) = lm::linear_lstsq(&design, &trace.y)
        .ok_or_else(|| fit_error("gain sweep does not separate the asymptote", None))?;
    let m = trace.len();
    let sigma2 = if m > 2 { ssr / (m - 2) as f64 } else { 0.0 };
    Ok(FitResult {
        names: vec!["n_infinity".to_string(), "n_sys".to_string()],
        values: beta,
        covariance: inv
            .iter()
            .map(|row| row.iter().map(|v| v * sigma2).collect())
            .collect(),
        residual_rms: (ssr / m as f64).sqrt(),
        n_iterations: 1,
    })
}

/// One calibration sweep: on/off analyzer power difference versus thermal
/// occupation, at a fixed amplifier gain.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSweep {
    /// Amplifier power gain G_k, linear.
    pub gain_linear: f64,
    pub n_th: Vec<f64>,
    /// P_on - P_off (watt) at each occupation.
    pub p_delta: Vec<f64>,
}

/// Recovered photon-to-watt conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    /// z·G_T (watt/photon referred to the amplifier input).
    pub z_g_t: f64,
    pub z_g_t_sigma: f64,
    /// Per-sweep d(P_on - P_off)/d(n_th) slopes, input order.
    pub slopes: Vec<f64>,
    /// Rms of the per-sweep linear-fit residuals (watt).
    pub residual_rms: f64,
}

/// Calibrates the conversion from the gain dependence of the on/off power
/// difference: P_on - P_off = z·G_T·(G_k - 1)(2 n_th + n_k0 + 1), so each
/// sweep's slope against n_th is 2·z·G_T·(G_k - 1); a through-origin fit of
/// the slopes against G_k - 1 gives z·G_T. Sweeps at unity gain carry no
/// slope information and are skipped.
pub fn calibrate_conversion(sweeps: &[CalibrationSweep]) -> Result<CalibrationResult> {
    if sweeps.is_empty() {
        return Err(Error::DegenerateInput("no calibration sweeps given".into()));
    }
    let mut slopes = Vec::with_capacity(sweeps.len());
    let mut slope_vars = Vec::with_capacity(sweeps.len());
    let mut ssr_total = 0.0;
    let mut m_total = 0usize;
    for (i, sweep) in sweeps.iter().enumerate() {
        if sweep.gain_linear < 1.0 {
            return Err(Error::Domain(format!("sweep {i} has gain below 1")));
        }
        if sweep.n_th.len() != sweep.p_delta.len() || sweep.n_th.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "sweep {i} needs at least 2 matched points"
            )));
        }
        if sweep.n_th.iter().any(|&n| n < 0.0) {
            return Err(Error::Domain(format!("sweep {i} has negative occupation")));
        }
        let mut n_sorted = sweep.n_th.clone();
        n_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if count_distinct(&n_sorted) < 2 {
            return Err(Error::DegenerateInput(format!(
                "sweep {i} spans a single occupation"
            )));
        }
        let design: Vec<Vec<f64>> = sweep.n_th.iter().map(|&n| vec![1.0, n]).collect();
        let (beta, inv, ssr) = lm::linear_lstsq(&design, &sweep.p_delta)
            .ok_or_else(|| fit_error(format!("sweep {i} design is singular"), None))?;
        let m = sweep.n_th.len();
        let sigma2 = if m > 2 { ssr / (m - 2) as f64 } else { 0.0 };
        slopes.push(beta[1]);
        slope_vars.push(inv[1][1] * sigma2);
        ssr_total += ssr;
        m_total += m;
    }
    let informative: Vec<usize> = sweeps
        .iter()
        .enumerate()
        .filter(|(_, s)| s.gain_linear > 1.0)
        .map(|(i, _)| i)
        .collect();
    if informative.is_empty() {
        return Err(Error::DegenerateInput(
            "calibration needs a sweep with gain above 1".into(),
        ));
    }
    let wsum2: f64 = informative
        .iter()
        .map(|&i| (sweeps[i].gain_linear - 1.0).powi(2))
        .sum();
    let s: f64 = informative
        .iter()
        .map(|&i| slopes[i] * (sweeps[i].gain_linear - 1.0))
        .sum::<f64>()
        / wsum2;
    let var_s = if informative.len() >= 2 {
        let resid: f64 = informative
            .iter()
            .map(|&i| (slopes[i] - s * (sweeps[i].gain_linear - 1.0)).powi(2))
            .sum();
        resid / (informative.len() - 1) as f64 / wsum2
    } else {
        let i = informative[0];
        slope_vars[i] / (sweeps[i].gain_linear - 1.0).powi(2)
    };
    let z_g_t = 0.5 * s;
    if !(z_g_t > 0.0) {
        return Err(fit_error(
            format!("calibration slope implies non-positive conversion ({z_g_t:.4e} W/photon)"),
            None,
        ));
    }
    Ok(CalibrationResult {
        z_g_t,
        z_g_t_sigma: 0.5 * var_s.max(0.0).sqrt(),
        slopes,
        residual_rms: (ssr_total / m_total as f64).sqrt(),
    })
}

/// Gain-compression classification of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Compression {
    /// Gain dropped 1 dB below its small-signal value inside the sweep.
    Saturated {
        p_in_dbm: f64,
        p_out_dbm: f64,
        g0_db: f64,
    },
    /// No 1 dB crossing inside the sweep.
    NotSaturated { g0_db: f64 },
}

/// Locates the 1 dB compression point of a gain-versus-power sweep.
///
/// `trace`: input power (dBm, increasing) versus gain (dB). The small-signal
/// reference g0 is the mean gain of the 10 lowest-power points; the crossing
/// of g0 - 1 dB is linearly interpolated.
pub fn compression_point(trace: &Trace) -> Result<Compression> {
    if trace.len() < 11 {
        return Err(Error::DegenerateInput(
            "compression sweep needs at least 11 points".into(),
        ));
    }
    let g0 = trace.y[..10].iter().sum::<f64>() / 10.0;
    let level = g0 - 1.0;
    let Some(idx) = trace.y.iter().position(|&g| g <= level) else {
        return Ok(Compression::NotSaturated { g0_db: g0 });
    };
    let p_in = if idx == 0 {
        trace.x[0]
    } else {
        let (x0, y0) = (trace.x[idx - 1], trace.y[idx - 1]);
        let (x1, y1) = (trace.x[idx], trace.y[idx]);
        x0 + (y0 - level) / (y0 - y1) * (x1 - x0)
    };
    Ok(Compression::Saturated {
        p_in_dbm: p_in,
        p_out_dbm: p_in + level,
        g0_db: g0,
    })
}
