use std::path::PathBuf;

use maglev_core::dynamics::{FeedbackConfig, Integrator, Window};
use maglev_core::field::{extract_gradients, CoilPair, QuadrupoleField};
use maglev_core::isolation::Stage;
use maglev_core::noise::{NoiseSpec, OscillatorMode};
use maglev_core::pickup::{OptimizerSettings, SquidParams};
use maglev_core::sphere::SphereParams;
use serde::Deserialize;

use crate::error::CliError;

/// Scenario document. Every section is optional; each command names the
/// sections it needs. SI units throughout.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Default seed of stochastic commands.
    pub seed: Option<u64>,
    pub sphere: Option<SphereParams>,
    pub field: Option<FieldSection>,
    pub mode: Option<OscillatorMode>,
    pub noise: Option<NoiseSpec>,
    pub squid: Option<SquidParams>,
    pub readout: Option<ReadoutSection>,
    pub coupling: Option<CouplingSection>,
    pub pickup: Option<PickupSection>,
    pub isolation: Option<IsolationSection>,
    pub filter: Option<FilterSection>,
    pub sim: Option<SimSection>,
    pub analysis: Option<AnalysisSection>,
}

/// Trap gradients given directly or derived from a coil pair.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// `(b_x, b_y, b_z)` in T/m, signed and trace-free or as magnitudes.
    pub gradients: Option<[f64; 3]>,
    pub coils: Option<CoilPair>,
}

impl FieldSection {
    pub fn resolve(&self) -> Result<QuadrupoleField, CliError> {
        match (&self.gradients, &self.coils) {
            (Some(g), None) => QuadrupoleField::from_components(*g).map_err(|e| CliError::invalid("field.gradients", e)),
            (None, Some(c)) => Ok(extract_gradients(c)?.field),
            _ => Err(CliError::Validation(
                "field: give exactly one of `field.gradients` and `field.coils`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSection {
    /// Coupling strength (Φ₀/m) of the ground-state budget.
    pub eta: Option<f64>,
    /// Frequency bin (Hz) over which the resonance drifts.
    pub bin_width: Option<f64>,
}

/// Coaxial single-turn loops on the grid `r_p × z_p`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub r_p: Vec<f64>,
    pub z_p: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickupSection {
    /// m.
    pub wire_width: f64,
    /// Edge-to-edge gap between turns (m).
    pub gap: f64,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweep {
    /// Hz.
    pub start: f64,
    /// Hz.
    pub stop: f64,
    pub points: usize,
}

impl Default for FrequencySweep {
    fn default() -> Self {
        FrequencySweep {
            start: 1.0,
            stop: 1000.0,
            points: 301,
        }
    }
}

impl FrequencySweep {
    /// Logarithmically spaced frequencies, `start` and `stop` included.
    pub fn frequencies(&self) -> Result<Vec<f64>, CliError> {
        if !(self.start > 0.0 && self.stop > self.start && self.points >= 2) {
            return Err(CliError::Validation(
                "isolation.sweep: need 0 < start < stop and at least 2 points".into(),
            ));
        }
        let ratio = (self.stop / self.start).ln();
        Ok((0..self.points)
            .map(|i| self.start * (ratio * i as f64 / (self.points - 1) as f64).exp())
            .collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsolationSection {
    /// Top (support) to bottom (payload).
    pub stages: Vec<Stage>,
    /// Explicit evaluation frequencies (Hz); overrides `sweep`.
    pub frequencies: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep: FrequencySweep,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    /// 1/s; alternatively `R_C` and `L_C`.
    pub kappa: Option<f64>,
    #[serde(rename = "R_C")]
    pub r_c: Option<f64>,
    #[serde(rename = "L_C")]
    pub l_c: Option<f64>,
    #[serde(default = "default_filter_frequencies")]
    pub frequencies: Vec<f64>,
    /// Times (s) at which to tabulate the step response.
    #[serde(default)]
    pub step_times: Vec<f64>,
}

fn default_filter_frequencies() -> Vec<f64> {
    vec![200.0]
}

fn one() -> usize {
    1
}

/// Time-domain run of the `[mode]` oscillator with the `[noise]` inputs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    /// s.
    pub dt: f64,
    /// s.
    pub duration: f64,
    pub seed: Option<u64>,
    #[serde(default)]
    pub initial: [f64; 2],
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub spectral: bool,
    #[serde(default)]
    pub feedback: FeedbackConfig,
    pub sweep: Option<SweepSection>,
    pub psd: Option<PsdSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "feedback.gain")]
    FeedbackGain,
    #[serde(rename = "feedback.phase")]
    FeedbackPhase,
    #[serde(rename = "noise.s_nn")]
    MeasurementNoise,
    #[serde(rename = "mode.T0")]
    BathTemperature,
    /// Independent repeats; the values only label the runs.
    #[serde(rename = "replica")]
    Replica,
}

impl SweepParameter {
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::FeedbackGain => "feedback.gain",
            SweepParameter::FeedbackPhase => "feedback.phase",
            SweepParameter::MeasurementNoise => "noise.s_nn",
            SweepParameter::BathTemperature => "mode.T0",
            SweepParameter::Replica => "replica",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsdSection {
    /// Samples per segment.
    pub segment: usize,
    /// Defaults to half a segment.
    pub overlap: Option<usize>,
    #[serde(default)]
    pub window: Window,
    /// `[low, high]` Hz band of a Lorentzian fit.
    pub fit_band: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    X,
    #[default]
    YMeas,
}

/// Post-processing of a recorded `t,x,y_meas` series.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// Relative paths resolve against the scenario directory.
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub channel: Channel,
    pub psd: Option<PsdSection>,
    /// Carrier guess (Hz) of a ringdown fit.
    pub ringdown: Option<f64>,
    /// Also fit two decay rates with a free breakpoint.
    #[serde(default)]
    pub two_segment: bool,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {}", e.to_string().trim_end())))?;
        s.validate()?;
        Ok(s)
    }

    /// Cross-field checks the typed layout cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(f) = &self.filter {
            match (f.kappa, f.r_c, f.l_c) {
                (Some(_), None, None) | (None, Some(_), Some(_)) => {}
                _ => {
                    return Err(CliError::Validation(
                        "filter: give either `filter.kappa` or both `filter.R_C` and `filter.L_C`".into(),
                    ))
                }
            }
        }
        if let Some(s) = &self.sim {
            if let Some(sw) = &s.sweep {
                if sw.values.is_empty() {
                    return Err(CliError::Validation("sim.sweep.values: at least one value is required".into()));
                }
            }
        }
        Ok(())
    }

    pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section
            .as_ref()
            .ok_or_else(|| CliError::Validation(format!("{name}: section is required by this command")))
    }
}
