use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{split_seed, SimConfig};
use super::simulate::Simulator;
use crate::constants::K_B;
use crate::error::{ensure_positive, Result};
use crate::noise::{NoiseCurve, OscillatorMode};
use crate::quadrature::linear_fit;

/// Acceptance band of the measured-to-predicted heating ratio.
pub const HEATING_TOLERANCE: f64 = 0.2;

/// Ensemble parameters of the heating check. Each source is driven alone on
/// an undamped mode so that the energy growth isolates its rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatingSettings {
    /// kg.
    pub mass: f64,
    /// Hz.
    pub f0: f64,
    /// White trap-centre PSD (m²/Hz).
    pub s_epseps: f64,
    /// White fractional spring PSD (1/Hz).
    pub s_deltadelta: f64,
    /// Initial amplitude of the parametric runs (m).
    pub amplitude: f64,
    /// Bath temperature of the reference run (K).
    pub t0: f64,
    /// Damping of the reference run (1/s).
    pub gamma: f64,
    pub runs: usize,
    /// s.
    pub duration: f64,
    pub checkpoints: usize,
    pub seed: u64,
}

impl Default for HeatingSettings {
    fn default() -> Self {
        let f0: f64 = 5.0;
        let w0 = 2.0 * PI * f0;
        HeatingSettings {
            mass: 1e-9,
            f0,
            s_epseps: 1e-12,
            // Γ_δ = 0.05 1/s
            s_deltadelta: 4.0 * 0.05 / (w0 * w0),
            amplitude: 1e-6,
            t0: 1e-3,
            gamma: 1.0,
            runs: 200,
            duration: 20.0,
            checkpoints: 40,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatingRow {
    pub source: String,
    pub predicted: f64,
    pub measured: f64,
    pub units: String,
    pub ratio: f64,
    pub pass: bool,
}

impl HeatingRow {
    fn new(source: &str, predicted: f64, measured: f64, units: &str) -> Self {
        let ratio = measured / predicted;
        HeatingRow {
            source: source.into(),
            predicted,
            measured,
            units: units.into(),
            ratio,
            pass: (ratio - 1.0).abs() <= HEATING_TOLERANCE,
        }
    }
}

/// Ensemble mean energy at `checkpoints` equally spaced times after `t = 0`.
fn mean_energy(base: &SimConfig, runs: usize, checkpoints: usize, master: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let steps = base.steps();
    let every = (steps / checkpoints).max(1);
    let per_run: Vec<Vec<f64>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut c = base.clone();
            c.seed = split_seed(master, i as u64);
            let mut sim = Simulator::new(c)?;
            let mut out = Vec::with_capacity(checkpoints);
            for k in 1..=steps {
                sim.step()?;
                if k % every == 0 && out.len() < checkpoints {
                    out.push(sim.energy());
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let t = (1..=checkpoints).map(|j| (j * every) as f64 * base.dt).collect();
    let e = (0..checkpoints)
        .map(|j| per_run.iter().map(|r| r[j]).sum::<f64>() / runs as f64)
        .collect();
    Ok((t, e))
}

/// Compares simulated ensemble heating with `Q̇_ε = ¼mω₀⁴S_εε` and
/// `Γ_δ = ¼ω₀²S_δδ`, and checks that a bath-only run settles at `k_B T₀`.
pub fn heating_validation(s: &HeatingSettings) -> Result<Vec<HeatingRow>> {
    ensure_positive("heating.runs", s.runs as f64)?;
    ensure_positive("heating.checkpoints", s.checkpoints as f64)?;
    let w0 = 2.0 * PI * s.f0;
    let dt = 1.0 / (100.0 * s.f0);
    let undamped = OscillatorMode::new(s.mass, w0, 0.0, 0.0)?;

    let mut eps = SimConfig::new(undamped, dt, s.duration, 0);
    eps.noise.s_epseps = NoiseCurve::constant(s.s_epseps)?;
    let (t, e) = mean_energy(&eps, s.runs, s.checkpoints, split_seed(s.seed, 0))?;
    let (_, qdot, _) = linear_fit(&t, &e);
    let eps_row = HeatingRow::new("trap_center", 0.25 * s.mass * w0.powi(4) * s.s_epseps, qdot, "W");

    let mut delta = SimConfig::new(undamped, dt, s.duration, 0);
    delta.noise.s_deltadelta = NoiseCurve::constant(s.s_deltadelta)?;
    delta.initial = [s.amplitude, 0.0];
    let (t, e) = mean_energy(&delta, s.runs, s.checkpoints, split_seed(s.seed, 1))?;
    let ln_e: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let (_, rate, _) = linear_fit(&t, &ln_e);
    let delta_row = HeatingRow::new("spring_constant", 0.25 * w0 * w0 * s.s_deltadelta, rate, "1/s");

    // bath only: relax for several 1/γ, then average the plateau
    let bath = OscillatorMode::new(s.mass, w0, s.gamma, s.t0)?;
    let settle = 5.0 / s.gamma;
    let plateau = SimConfig::new(bath, dt, settle + s.duration, 0);
    let (t, e) = mean_energy(&plateau, s.runs, s.checkpoints, split_seed(s.seed, 2))?;
    let tail: Vec<f64> = t.iter().zip(&e).filter(|(ti, _)| **ti >= settle).map(|(_, ei)| *ei).collect();
    let level = tail.iter().sum::<f64>() / tail.len() as f64;
    let bath_row = HeatingRow::new("none", K_B * s.t0, level, "J");

    Ok(vec![eps_row, delta_row, bath_row])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ensemble_tracks_formulas() {
        let s = HeatingSettings {
            runs: 64,
            duration: 10.0,
            s_deltadelta: 4.0 * 0.1 / (2.0 * PI * 5.0f64).powi(2),
            ..Default::default()
        };
        let rows = heating_validation(&s).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!((r.ratio - 1.0).abs() < 0.35, "{r:?}");
        }
    }
}
