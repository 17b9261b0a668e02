use std::f64::consts::PI;

use serde::Serialize;

use super::curve::NoiseCurve;
use super::oscillator::{susceptibility, OscillatorMode};
use crate::constants::K_B;
use crate::error::{ensure_positive, Error, Result};

/// Sphere displacement PSD `|χ(ω)|² m² ω₀⁴ S_εε(ω)` (m²/Hz) driven by motion
/// of the trap centre.
pub fn vibration_displacement_psd(mode: &OscillatorMode, s_epseps: &NoiseCurve, omega: f64) -> f64 {
    let w0 = mode.omega0();
    susceptibility(mode, omega).norm_sqr() * (mode.mass() * w0 * w0).powi(2) * s_epseps.eval(omega / (2.0 * PI))
}

/// Steady-state energy `Q̇_ε / γ` (J).
pub fn vibration_energy(mode: &OscillatorMode, s_epseps: &NoiseCurve) -> Result<f64> {
    ensure_positive("mode.gamma", mode.gamma())?;
    Ok(heating_rates(mode, s_epseps, &NoiseCurve::Constant(0.0)).qdot_eps / mode.gamma())
}

/// Root-mean-square displacement `sqrt(E / (m ω₀²))` (m).
pub fn vibration_rms(mode: &OscillatorMode, s_epseps: &NoiseCurve) -> Result<f64> {
    let e = vibration_energy(mode, s_epseps)?;
    Ok((e / (mode.mass() * mode.omega0().powi(2))).sqrt())
}

/// Effective temperature `E / k_B` (K).
pub fn vibration_teff(mode: &OscillatorMode, s_epseps: &NoiseCurve) -> Result<f64> {
    Ok(vibration_energy(mode, s_epseps)? / K_B)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatingRates {
    /// `¼ m ω₀⁴ S_εε(ω₀)` (W).
    pub qdot_eps: f64,
    /// `¼ ω₀² S_δδ(2ω₀)` (1/s).
    pub gamma_delta: f64,
}

pub fn heating_rates(mode: &OscillatorMode, s_epseps: &NoiseCurve, s_deltadelta: &NoiseCurve) -> HeatingRates {
    let w0 = mode.omega0();
    let f0 = mode.f0();
    HeatingRates {
        qdot_eps: 0.25 * mode.mass() * w0.powi(4) * s_epseps.eval(f0),
        gamma_delta: 0.25 * w0 * w0 * s_deltadelta.eval(2.0 * f0),
    }
}

/// `(k_B T₀ γ + Q̇_ε) / (k_B (γ − Γ_δ))` (K).
pub fn effective_temperature(mode: &OscillatorMode, rates: &HeatingRates) -> Result<f64> {
    let gamma = mode.gamma();
    if rates.gamma_delta >= gamma {
        return Err(Error::UnstableHeating {
            gamma_delta: rates.gamma_delta,
            gamma,
        });
    }
    Ok((K_B * mode.t0() * gamma + rates.qdot_eps) / (K_B * (gamma - rates.gamma_delta)))
}
