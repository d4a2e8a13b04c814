//! Quadrature-domain picture of the amplifier: the affine transformation it
//! applies to (I, Q), coherent-state ellipses including a parasitic reflection
//! path, and vacuum-noise squeezing levels.
//!
//! The transformation is derived for real κ; complex κ falls back to its real
//! part and the result carries a flag saying so.

use crate::circuit::DpaParams;
use crate::error::{Error, Result};
use crate::iotheory::oscillation_margin;
use crate::units::power_db;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// One point in the quadrature plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePoint {
    pub i: f64,
    pub q: f64,
}

/// The 2×2 affine map the amplifier applies to input quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeTransform {
    /// Row-major matrix elements.
    pub m: [[f64; 2]; 2],
    /// Pump phase the matrix was evaluated at (radian).
    pub varphi_p: f64,
    /// Model parameters the matrix was derived from.
    pub params: DpaParams,
    /// True when a complex κ was reduced to its real part.
    pub kappa_imag_dropped: bool,
}

impl SqueezeTransform {
    pub fn apply(&self, p: QuadraturePoint) -> QuadraturePoint {
        QuadraturePoint {
            i: self.m[0][0] * p.i + self.m[0][1] * p.q,
            q: self.m[1][0] * p.i + self.m[1][1] * p.q,
        }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Singular values (larger, smaller).
    pub fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.m;
        let q1 = a * a + b * b + c * c + d * d;
        let diff = a * a + b * b - c * c - d * d;
        let cross = a * c + b * d;
        let q2 = (diff * diff + 4.0 * cross * cross).sqrt();
        let s_max = (0.5 * (q1 + q2)).sqrt();
        if s_max == 0.0 {
            return (0.0, 0.0);
        }
        // q1 - q2 cancels at high gain; the determinant quotient is stable.
        (s_max, (self.det() / s_max).abs())
    }
}

/// Parasitic reflection path: magnitude, phase, and the complementary
/// transmission t = sqrt(1 - r²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionModel {
    pub r: f64,
    pub phi: f64,
}

impl ReflectionModel {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(
                "reflection magnitude must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { r, phi })
    }

    /// No parasitic path at all.
    pub fn none() -> Self {
        Self { r: 0.0, phi: 0.0 }
    }

    pub fn t(&self) -> f64 {
        (1.0 - self.r * self.r).sqrt()
    }
}

fn check_below_threshold(params: &DpaParams) -> Result<()> {
    let margin = oscillation_margin(params);
    if margin > 0.0 {
        return Err(Error::AboveThreshold { margin });
    }
    if margin == 0.0 {
        return Err(Error::Singularity(
            "quadrature transformation diverges at the oscillation boundary".into(),
        ));
    }
    Ok(())
}

/// Quadrature transformation matrix at pump phase `varphi_p`.
///
/// A(φ_p) = (κ/D₀)[[κ̄ - |ξ|sinφ_p, Δ - |ξ|cosφ_p], [-Δ - |ξ|cosφ_p, κ̄ + |ξ|sinφ_p]] - 1,
/// with κ̄ = (κ+γ)/2 and D₀ = Δ² + κ̄² - |ξ|².
pub fn transform_matrix(params: &DpaParams, varphi_p: f64) -> Result<SqueezeTransform> {
    check_below_threshold(params)?;
    let kappa = params.kappa.re;
    let kb = 0.5 * (kappa + params.gamma);
    let xi = params.xi.norm();
    let delta = params.delta;
    let d0 = delta * delta + kb * kb - xi * xi;
    let c = kappa / d0;
    let (s, x) = (xi * varphi_p.sin(), xi * varphi_p.cos());
    Ok(SqueezeTransform {
        m: [
            [c * (kb - s) - 1.0, c * (delta - x)],
            [c * (-delta - x), c * (kb + s) - 1.0],
        ],
        varphi_p,
        params: *params,
        kappa_imag_dropped: params.kappa.im != 0.0,
    })
}

/// Pump phase that aligns the amplified quadrature with the I axis.
///
/// Returns 3π/2 for Δ = 0 (the matrix is then strictly diagonal), otherwise
/// π/2 - arccos(-Δ/|ξ|). No alignment exists for |Δ| > |ξ|.
pub fn aligned_phase(params: &DpaParams) -> Result<f64> {
    if params.delta == 0.0 {
        return Ok(1.5 * PI);
    }
    let xi = params.xi.norm();
    if params.delta.abs() > xi {
        return Err(Error::Alignment(format!(
            "|Δ| = {:.3e} exceeds |ξ| = {:.3e}; no pump phase aligns the quadratures",
            params.delta.abs(),
            xi
        )));
    }
    Ok(FRAC_PI_2 - (-params.delta / xi).acos())
}

/// Image of a coherent-state circle under the amplifier plus a parasitic
/// reflection: [t·A(φ_p) + r·R(φ)] applied to (a cos θ_k, a sin θ_k) for
/// `n_phases` uniformly spaced θ_k.
pub fn ellipse_sweep(
    params: &DpaParams,
    varphi_p: f64,
    refl: &ReflectionModel,
    amplitude: f64,
    n_phases: usize,
) -> Result<Vec<QuadraturePoint>> {
    if n_phases < 8 {
        return Err(Error::Domain(
            "ellipse sweep needs at least 8 phases".into(),
        ));
    }
    let a = transform_matrix(params, varphi_p)?;
    let (t, r) = (refl.t(), refl.r);
    let (sin_phi, cos_phi) = refl.phi.sin_cos();
    let m = [
        [t * a.m[0][0] + r * cos_phi, t * a.m[0][1] - r * sin_phi],
        [t * a.m[1][0] + r * sin_phi, t * a.m[1][1] + r * cos_phi],
    ];
    Ok((0..n_phases)
        .map(|k| {
            let theta = TAU * k as f64 / n_phases as f64;
            QuadraturePoint {
                i: amplitude * (m[0][0] * theta.cos() + m[0][1] * theta.sin()),
                q: amplitude * (m[1][0] * theta.cos() + m[1][1] * theta.sin()),
            }
        })
        .collect())
}

/// Amplification and squeezing read off a pump-on / pump-off ellipse pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGains {
    /// Amplification along I: ptp(I_on)/ptp(I_off) in dB.
    pub g_a_db: f64,
    /// Squeezing along Q: ptp(Q_off)/ptp(Q_on) in dB.
    pub g_s_db: f64,
}

fn peak_to_peak(points: &[QuadraturePoint], pick: impl Fn(&QuadraturePoint) -> f64) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let v = pick(p);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Peak-to-peak gain ratios between a pump-on and a pump-off sweep, assuming
/// the amplified quadrature is aligned with I.
pub fn extract_gs_ga(
    on_points: &[QuadraturePoint],
    off_points: &[QuadraturePoint],
) -> Result<QuadratureGains> {
    let i_on = peak_to_peak(on_points, |p| p.i);
    let i_off = peak_to_peak(off_points, |p| p.i);
    let q_on = peak_to_peak(on_points, |p| p.q);
    let q_off = peak_to_peak(off_points, |p| p.q);
    if [i_on, i_off, q_on, q_off].iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateInput(
            "peak-to-peak amplitude is zero in at least one quadrature".into(),
        ));
    }
    Ok(QuadratureGains {
        g_a_db: crate::units::amplitude_db(i_on / i_off),
        g_s_db: crate::units::amplitude_db(q_off / q_on),
    })
}

/// Change of the I-quadrature noise variance relative to the input, in dB:
/// 10 log10(m11² + m12² + (γ/κ)((m11+1)² + m12²)).
///
/// Input and bath are taken at equal temperature, so the ratio is
/// temperature-independent; see [`quadrature_variance`] for absolute values.
pub fn noise_variance_gain(params: &DpaParams, varphi_p: f64) -> Result<f64> {
    let a = transform_matrix(params, varphi_p)?;
    let ratio = params.gamma / params.kappa.re;
    let (m11, m12) = (a.m[0][0], a.m[0][1]);
    Ok(power_db(
        m11 * m11 + m12 * m12 + ratio * ((m11 + 1.0) * (m11 + 1.0) + m12 * m12),
    ))
}

/// Absolute I-quadrature output variance for input and bath holding `n_th`
/// thermal photons: (n_th/2 + 1/4) times the linear variance gain.
pub fn quadrature_variance(params: &DpaParams, varphi_p: f64, n_th: f64) -> Result<f64> {
    if n_th < 0.0 {
        return Err(Error::Domain("n_th must be >= 0".into()));
    }
    let gain_db = noise_variance_gain(params, varphi_p)?;
    Ok((0.5 * n_th + 0.25) * crate::units::db_power(gain_db))
}

/// A pump phase together with the variance gain reached there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePoint {
    pub varphi_p: f64,
    pub level_db: f64,
}

/// Golden-section refinement of a scalar minimum inside [a, b].
fn golden_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn variance_extremum(params: &DpaParams, sign: f64) -> Result<VariancePoint> {
    check_below_threshold(params)?;
    const GRID: usize = 720;
    let f =
        |phi: f64| sign * noise_variance_gain(params, phi).expect("params checked below threshold");
    let (mut best_k, mut best) = (0, f64::INFINITY);
    for k in 0..GRID {
        let v = f(TAU * k as f64 / GRID as f64);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let step = TAU / GRID as f64;
    let center = best_k as f64 * step;
    let (phi, level) = golden_minimize(f, center - step, center + step, 1e-6);
    Ok(VariancePoint {
        varphi_p: phi.rem_euclid(TAU),
        level_db: sign * level,
    })
}

/// Minimum of [`noise_variance_gain`] over the pump phase (720-point grid plus
/// golden-section refinement to 1e-6 rad).
pub fn vacuum_squeezing_minimum(params: &DpaParams) -> Result<VariancePoint> {
    variance_extremum(params, 1.0)
}

/// Maximum of [`noise_variance_gain`] over the pump phase.
pub fn antisqueezing_maximum(params: &DpaParams) -> Result<VariancePoint> {
    variance_extremum(params, -1.0)
}

/// Vacuum squeezing level: the minimum variance gain over the pump phase, dB.
pub fn vacuum_squeezing_level(params: &DpaParams) -> Result<f64> {
    Ok(vacuum_squeezing_minimum(params)?.level_db)
}
