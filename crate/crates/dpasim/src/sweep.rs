//! Sweep driver: evaluates an inner command once per axis value and emits one
//! summary row per point, ordered by the axis.

use clap::ValueEnum;

use crate::commands::{
    self, DEFAULT_ELLIPSE_POINTS, DEFAULT_PHASE_POINTS, DEFAULT_SPAN_HZ, DEFAULT_SPECTRUM_POINTS,
    NOISE_BUDGET_COLUMNS,
};
use crate::config::Resolved;
use crate::table::Output;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    /// Source pump power (dBm).
    PumpPower,
    /// Pump phase (rad).
    Phase,
    /// Internal quality factor.
    QInternal,
    /// Environment temperature (K).
    Temperature,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::PumpPower => "p_pump_dbm",
            SweepVariable::Phase => "varphi_p_rad",
            SweepVariable::QInternal => "q_internal",
            SweepVariable::Temperature => "temperature_k",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InnerCommand {
    GainSpectrum,
    PhaseGain,
    Ellipse,
    SqueezeBudget,
    NoiseBudget,
}

impl InnerCommand {
    fn name(self) -> &'static str {
        match self {
            InnerCommand::GainSpectrum => "gain-spectrum",
            InnerCommand::PhaseGain => "phase-gain",
            InnerCommand::Ellipse => "ellipse",
            InnerCommand::SqueezeBudget => "squeeze-budget",
            InnerCommand::NoiseBudget => "noise-budget",
        }
    }

    fn supports(self, variable: SweepVariable) -> bool {
        match variable {
            SweepVariable::PumpPower | SweepVariable::QInternal => true,
            SweepVariable::Phase => matches!(
                self,
                InnerCommand::Ellipse | InnerCommand::SqueezeBudget | InnerCommand::NoiseBudget
            ),
            SweepVariable::Temperature => matches!(self, InnerCommand::NoiseBudget),
        }
    }
}

/// Applies one axis value to a copy of the resolved configuration.
fn apply(resolved: &Resolved, variable: SweepVariable, value: f64) -> Result<Resolved, CliError> {
    let mut point = resolved.clone();
    match variable {
        SweepVariable::PumpPower => point.drive.p_pump_dbm = value,
        SweepVariable::Phase => point.drive.varphi_p = value,
        SweepVariable::QInternal => point.device.q_internal = value,
        SweepVariable::Temperature => {
            let env = point.environment()?;
            point.environment = Some(
                dpa::noisechain::Environment::new(env.frequency, value).map_err(CliError::from)?,
            );
        }
    }
    Ok(point)
}

pub fn run(
    resolved: &Resolved,
    inner: InnerCommand,
    variable: SweepVariable,
    mut values: Vec<f64>,
    span: Option<f64>,
    points: Option<usize>,
) -> Result<Output, CliError> {
    if !inner.supports(variable) {
        return Err(CliError::Config(format!(
            "variable {:?} does not apply to {}",
            variable.column(),
            inner.name()
        )));
    }
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite sweep values"));

    let mut columns = vec![variable.column()];
    match inner {
        InnerCommand::GainSpectrum => columns.extend(["peak_gain_db", "peak_freq_hz"]),
        InnerCommand::PhaseGain => columns.extend([
            "max_gain_db",
            "max_phase_rad",
            "min_gain_db",
            "min_phase_rad",
        ]),
        InnerCommand::Ellipse => columns.extend(["r_max", "r_min", "area", "g_a_db", "g_s_db"]),
        InnerCommand::SqueezeBudget => columns.extend(["vac_min_db", "anti_max_db", "plateau_db"]),
        InnerCommand::NoiseBudget => columns.extend(NOISE_BUDGET_COLUMNS),
    }

    let mut rows = Vec::with_capacity(values.len());
    for &value in &values {
        let row = evaluate(resolved, inner, variable, value, span, points)
            .map_err(|e| e.at_point(variable.column(), value))?;
        rows.push(row);
    }
    Ok(Output::Table { columns, rows })
}

fn evaluate(
    resolved: &Resolved,
    inner: InnerCommand,
    variable: SweepVariable,
    value: f64,
    span: Option<f64>,
    points: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    let point = apply(resolved, variable, value)?;
    let mut row = vec![value];
    match inner {
        InnerCommand::GainSpectrum => {
            let span = span.unwrap_or(DEFAULT_SPAN_HZ);
            let n = points.unwrap_or(DEFAULT_SPECTRUM_POINTS);
            let Output::Table { rows, .. } = commands::gain_spectrum(&point, Some(span), Some(n))?
            else {
                unreachable!("gain-spectrum emits a table");
            };
            let peak = rows
                .iter()
                .max_by(|a, b| a[1].partial_cmp(&b[1]).expect("finite gains"))
                .expect("nonempty spectrum");
            row.extend([peak[1], peak[0]]);
        }
        InnerCommand::PhaseGain => {
            let n = points.unwrap_or(DEFAULT_PHASE_POINTS);
            let Output::Table { rows, .. } = commands::phase_gain(&point, Some(n))? else {
                unreachable!("phase-gain emits a table");
            };
            let max = rows
                .iter()
                .max_by(|a, b| a[1].partial_cmp(&b[1]).expect("finite gains"))
                .expect("nonempty sweep");
            let min = rows
                .iter()
                .min_by(|a, b| a[1].partial_cmp(&b[1]).expect("finite gains"))
                .expect("nonempty sweep");
            row.extend([max[1], max[0], min[1], min[0]]);
        }
        InnerCommand::Ellipse => {
            let n = points.unwrap_or(DEFAULT_ELLIPSE_POINTS);
            row.extend(commands::ellipse_summary(&point, n)?);
        }
        InnerCommand::SqueezeBudget => {
            let b = commands::squeeze_budget_values(&point)?;
            row.extend([b.vac_min_db, b.anti_max_db, b.plateau_db]);
        }
        InnerCommand::NoiseBudget => row.extend(commands::noise_budget_row(&point)?),
    }
    Ok(row)
}
