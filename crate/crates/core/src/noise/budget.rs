use std::io::Write;

use serde::Serialize;

use super::curve::NoiseCurve;
use super::oscillator::{
    drift_averaged_sensitivity, force_sensitivity, noise_equivalent_temperature, thermal_acceleration_noise,
    thermal_force_noise, OscillatorMode,
};
use super::quantum::{cold_damping_gain, feedback_phonon_number};
use super::vibration::{
    effective_temperature, heating_rates, vibration_displacement_psd, vibration_energy, vibration_rms, vibration_teff,
};
use crate::constants::{HBAR, PHI_0};
use crate::error::Result;
use crate::pickup::SquidCircuit;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetLine {
    pub quantity: String,
    pub value: f64,
    pub units: String,
    /// The expression the value was evaluated from.
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct BudgetReport {
    pub title: String,
    pub lines: Vec<BudgetLine>,
}

impl BudgetReport {
    pub fn new(title: &str) -> Self {
        BudgetReport {
            title: title.to_string(),
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, quantity: &str, value: f64, units: &str, anchor: &str) {
        self.lines.push(BudgetLine {
            quantity: quantity.into(),
            value,
            units: units.into(),
            anchor: anchor.into(),
        });
    }

    pub fn get(&self, quantity: &str) -> Option<f64> {
        self.lines.iter().find(|l| l.quantity == quantity).map(|l| l.value)
    }

    pub fn extend(&mut self, other: BudgetReport) {
        self.lines.extend(other.lines);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "quantity,value,units,formula anchor")?;
        for l in &self.lines {
            writeln!(
                w,
                "{},{:e},{},{}",
                csv_field(&l.quantity),
                l.value,
                csv_field(&l.units),
                csv_field(&l.anchor)
            )?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Thermal and imprecision-limited force sensing, optionally with the
/// resonance smeared over a frequency bin of `bin_width` Hz.
pub fn sensing_budget(mode: &OscillatorMode, s_nn: f64, bin_width: Option<f64>) -> Result<BudgetReport> {
    let mut r = BudgetReport::new("sensing");
    r.push("f0", mode.f0(), "Hz", "omega0 / 2 pi");
    r.push("Q", mode.q(), "1", "omega0 / gamma");
    r.push("gamma", mode.gamma(), "1/s", "omega0 / Q");
    r.push("thermal_force_noise", thermal_force_noise(mode), "N/sqrt(Hz)", "sqrt(4 kB T0 m gamma)");
    let (acc, acc_g) = thermal_acceleration_noise(mode);
    r.push("thermal_acceleration_noise", acc, "m/s^2/sqrt(Hz)", "sqrt(4 kB T0 m gamma) / m");
    r.push("thermal_acceleration_noise_g", acc_g, "g/sqrt(Hz)", "sqrt(4 kB T0 m gamma) / (m g)");
    r.push("sqrt_s_nn", s_nn.sqrt(), "m/sqrt(Hz)", "input");
    r.push(
        "force_sensitivity_resonant",
        force_sensitivity(mode, s_nn, mode.omega0()),
        "N/sqrt(Hz)",
        "sqrt(4 kB T0 m gamma + |chi(omega0)|^-2 S_nn)",
    );
    r.push(
        "noise_equivalent_temperature",
        noise_equivalent_temperature(mode, s_nn)?,
        "K",
        "T0 + |chi(omega0)|^-2 S_nn / (4 kB m gamma)",
    );
    if let Some(df) = bin_width {
        let d = drift_averaged_sensitivity(mode, s_nn, df)?;
        r.push("bin_width", df, "Hz", "input");
        r.push("susceptibility_degradation", d.degradation, "1", "|chi(f0)|^2 / |chi|^2_avg");
        r.push(
            "force_sensitivity_drift_averaged",
            d.sensitivity,
            "N/sqrt(Hz)",
            "sqrt(4 kB T0 m gamma + |chi|_avg^-2 S_nn)",
        );
        r.push(
            "noise_equivalent_temperature_drift_averaged",
            d.noise_equivalent_temperature,
            "K",
            "T0 + |chi|_avg^-2 S_nn / (4 kB m gamma)",
        );
    }
    Ok(r)
}

/// Response to trap-centre vibration.
pub fn vibration_budget(mode: &OscillatorMode, s_epseps: &NoiseCurve) -> Result<BudgetReport> {
    let mut r = BudgetReport::new("vibration");
    let peak = vibration_displacement_psd(mode, s_epseps, mode.omega0()).sqrt();
    r.push("sqrt_s_epseps_f0", s_epseps.eval(mode.f0()).sqrt(), "m/sqrt(Hz)", "input");
    r.push("peak_displacement_asd", peak, "m/sqrt(Hz)", "|chi(omega0)| m omega0^2 sqrt(S_epseps)");
    let rates = heating_rates(mode, s_epseps, &NoiseCurve::Constant(0.0));
    r.push("qdot_eps", rates.qdot_eps, "W", "m omega0^4 S_epseps(omega0) / 4");
    r.push("energy", vibration_energy(mode, s_epseps)?, "J", "Qdot_eps / gamma");
    r.push("rms_displacement", vibration_rms(mode, s_epseps)?, "m", "sqrt(E / (m omega0^2))");
    r.push("effective_temperature", vibration_teff(mode, s_epseps)?, "K", "E / kB");
    Ok(r)
}

/// Feedback cooling towards the ground state with a SQUID readout.
pub fn ground_state_budget(
    mode: &OscillatorMode,
    circuit: &SquidCircuit,
    eta: f64,
    s_epseps: &NoiseCurve,
    s_deltadelta: &NoiseCurve,
) -> Result<BudgetReport> {
    let mut r = BudgetReport::new("ground_state");
    r.push("eta", eta / PHI_0, "Phi0/m", "input");
    r.push("effective_inductance", circuit.effective_inductance(), "H", "sqrt(S_phiphi / S_JJ)");
    r.push("noise_product", circuit.noise_product() / HBAR, "hbar", "sqrt(S_phiphi S_JJ)");
    let n = feedback_phonon_number(mode, circuit, eta);
    r.push("n_thermal", n.thermal, "1", "kB T0 m gamma L_S~ / (hbar eta^2)");
    r.push("n_backaction", n.backaction, "1", "(sqrt(S_phiphi S_JJ) / hbar - 1) / 2");
    r.push("n_total", n.total, "1", "n_thermal + n_backaction");
    r.push("ground_state", f64::from(u8::from(n.total < 1.0)), "bool", "n_total < 1");
    let g = cold_damping_gain(mode, circuit, eta);
    r.push("feedback_rate", g.gamma_fb, "1/s", "eta^2 / (m omega0 L_S~)");
    let rates = heating_rates(mode, s_epseps, s_deltadelta);
    r.push("qdot_eps", rates.qdot_eps, "W", "m omega0^4 S_epseps(omega0) / 4");
    r.push("gamma_delta", rates.gamma_delta, "1/s", "omega0^2 S_deltadelta(2 omega0) / 4");
    r.push(
        "effective_temperature",
        effective_temperature(mode, &rates)?,
        "K",
        "(kB T0 gamma + Qdot_eps) / (kB (gamma - Gamma_delta))",
    );
    Ok(r)
}
