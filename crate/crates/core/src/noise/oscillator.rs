use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{K_B, STANDARD_GRAVITY};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::quadrature::integrate_adaptive;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMode {
    m: f64,
    f0: f64,
    #[serde(rename = "Q", default)]
    q: Option<f64>,
    #[serde(default)]
    gamma: Option<f64>,
    #[serde(rename = "T0", default)]
    t0: f64,
}

/// Damped harmonic centre-of-mass mode coupled to a bath at `T0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMode")]
pub struct OscillatorMode {
    mass: f64,
    omega0: f64,
    gamma: f64,
    t0: f64,
}

impl TryFrom<RawMode> for OscillatorMode {
    type Error = Error;

    fn try_from(r: RawMode) -> Result<Self> {
        ensure_positive("mode.f0", r.f0)?;
        let omega0 = 2.0 * PI * r.f0;
        let gamma = match (r.q, r.gamma) {
            (Some(q), None) => {
                ensure_positive("mode.Q", q)?;
                omega0 / q
            }
            (None, Some(g)) => g,
            _ => {
                return Err(Error::InvalidParameter {
                    name: "mode.Q",
                    reason: "exactly one of Q and gamma must be given".into(),
                })
            }
        };
        OscillatorMode::new(r.m, omega0, gamma, r.t0)
    }
}

impl OscillatorMode {
    pub fn new(mass: f64, omega0: f64, gamma: f64, t0: f64) -> Result<Self> {
        ensure_positive("mode.m", mass)?;
        ensure_positive("mode.omega0", omega0)?;
        ensure_non_negative("mode.gamma", gamma)?;
        ensure_non_negative("mode.T0", t0)?;
        Ok(OscillatorMode {
            mass,
            omega0,
            gamma,
            t0,
        })
    }

    /// Mode from its frequency in Hz and quality factor `Q = ω₀/γ`.
    pub fn from_quality(mass: f64, f0: f64, q: f64, t0: f64) -> Result<Self> {
        ensure_positive("mode.f0", f0)?;
        ensure_positive("mode.Q", q)?;
        Self::new(mass, 2.0 * PI * f0, 2.0 * PI * f0 / q, t0)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn f0(&self) -> f64 {
        self.omega0 / (2.0 * PI)
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    /// `ω₀/γ`; infinite for an undamped mode.
    pub fn q(&self) -> f64 {
        self.omega0 / self.gamma
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.mass, self.omega0, gamma, self.t0)
    }

    pub fn with_t0(self, t0: f64) -> Result<Self> {
        Self::new(self.mass, self.omega0, self.gamma, t0)
    }
}

/// `χ(ω) = 1 / [m(ω₀² − ω² − iγω)]` (m/N).
pub fn susceptibility(mode: &OscillatorMode, omega: f64) -> Complex64 {
    let w0 = mode.omega0;
    1.0 / (mode.mass * Complex64::new(w0 * w0 - omega * omega, -mode.gamma * omega))
}

/// Thermal force noise `sqrt(4 k_B T₀ m γ)` (N/√Hz).
pub fn thermal_force_noise(mode: &OscillatorMode) -> f64 {
    (4.0 * K_B * mode.t0 * mode.mass * mode.gamma).sqrt()
}

/// Thermal acceleration noise in m/s²/√Hz and in units of g/√Hz.
pub fn thermal_acceleration_noise(mode: &OscillatorMode) -> (f64, f64) {
    let a = thermal_force_noise(mode) / mode.mass;
    (a, a / STANDARD_GRAVITY)
}

/// `sqrt(4 k_B T₀ m γ + |χ(ω)|⁻² S_nn)` (N/√Hz).
pub fn force_sensitivity(mode: &OscillatorMode, s_nn: f64, omega: f64) -> f64 {
    let chi2 = susceptibility(mode, omega).norm_sqr();
    (4.0 * K_B * mode.t0 * mode.mass * mode.gamma + s_nn / chi2).sqrt()
}

/// `T₀ + |χ(ω₀)|⁻² S_nn / (4 k_B m γ)` (K).
pub fn noise_equivalent_temperature(mode: &OscillatorMode, s_nn: f64) -> Result<f64> {
    ensure_positive("mode.gamma", mode.gamma)?;
    let chi2 = susceptibility(mode, mode.omega0).norm_sqr();
    Ok(mode.t0 + s_nn / (chi2 * 4.0 * K_B * mode.mass * mode.gamma))
}

/// Sensitivity with the resonant susceptibility replaced by its mean over a
/// frequency bin of width `bin_width` (Hz) centred on the resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftAveraged {
    pub chi_sq_avg: f64,
    /// `|χ(f₀)|² / |χ|²_avg`, tending to `4 Δf / γ` for wide bins.
    pub degradation: f64,
    pub sensitivity: f64,
    pub noise_equivalent_temperature: f64,
}

pub fn drift_averaged_sensitivity(mode: &OscillatorMode, s_nn: f64, bin_width: f64) -> Result<DriftAveraged> {
    ensure_non_negative("bin_width", bin_width)?;
    ensure_positive("mode.gamma", mode.gamma)?;
    let f0 = mode.f0();
    if bin_width >= 2.0 * f0 {
        return Err(Error::InvalidParameter {
            name: "bin_width",
            reason: format!("bin of {bin_width} Hz extends below zero frequency"),
        });
    }
    let chi0 = susceptibility(mode, mode.omega0).norm_sqr();
    let chi_sq_avg = if bin_width == 0.0 {
        chi0
    } else {
        // f = f0 + hw tan(u) flattens the Lorentzian peak
        let hw = mode.gamma / (4.0 * PI);
        let u_max = (0.5 * bin_width / hw).atan();
        let integrand = |u: f64| {
            let c = u.cos();
            let f = f0 + hw * u.tan();
            susceptibility(mode, 2.0 * PI * f).norm_sqr() * hw / (c * c)
        };
        integrate_adaptive(integrand, -u_max, u_max, 1e-12, 0.0) / bin_width
    };
    let thermal = 4.0 * K_B * mode.t0 * mode.mass * mode.gamma;
    Ok(DriftAveraged {
        chi_sq_avg,
        degradation: chi0 / chi_sq_avg,
        sensitivity: (thermal + s_nn / chi_sq_avg).sqrt(),
        noise_equivalent_temperature: mode.t0 + s_nn / (chi_sq_avg * 4.0 * K_B * mode.mass * mode.gamma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_mode() -> OscillatorMode {
        OscillatorMode::from_quality(5.6e-9, 212.0, 2.6e7, 15e-3).unwrap()
    }

    #[test]
    fn susceptibility_limits() {
        let m = reference_mode();
        let dc = susceptibility(&m, 0.0);
        assert_eq!(dc.im, 0.0);
        assert!((dc.re * m.mass() * m.omega0().powi(2) - 1.0).abs() < 1e-14);
        let res = susceptibility(&m, m.omega0()).norm();
        let expect = m.q() / (m.mass() * m.omega0().powi(2));
        assert!((res / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_temperature_no_thermal_noise() {
        let m = reference_mode().with_t0(0.0).unwrap();
        assert_eq!(thermal_force_noise(&m), 0.0);
        assert_eq!(force_sensitivity(&m, 0.0, m.omega0()), 0.0);
    }

    #[test]
    fn mode_parses_with_q_or_gamma() {
        let m: OscillatorMode = serde_json::from_str(r#"{"m":1e-9,"f0":100,"Q":1000,"T0":0.01}"#).unwrap();
        assert!((m.q() - 1000.0).abs() < 1e-9);
        let g: OscillatorMode = serde_json::from_str(r#"{"m":1e-9,"f0":100,"gamma":2.0}"#).unwrap();
        assert_eq!(g.gamma(), 2.0);
        let e = serde_json::from_str::<OscillatorMode>(r#"{"m":-1,"f0":100,"Q":10}"#).unwrap_err();
        assert!(e.to_string().contains("mode.m"));
    }

    #[test]
    fn narrow_bin_recovers_resonance() {
        let m = reference_mode();
        let d = drift_averaged_sensitivity(&m, 1e-18, 0.0).unwrap();
        assert_eq!(d.degradation, 1.0);
        let tiny = drift_averaged_sensitivity(&m, 1e-18, 1e-3 * m.gamma() / (2.0 * PI)).unwrap();
        assert!((tiny.degradation - 1.0).abs() < 1e-5);
    }

    #[test]
    fn wide_bin_follows_linear_law() {
        let m = OscillatorMode::from_quality(1e-9, 100.0, 1e4, 0.0).unwrap();
        for factor in [100.0, 1000.0] {
            let df = factor * m.gamma() / (2.0 * PI);
            let d = drift_averaged_sensitivity(&m, 1e-18, df).unwrap();
            let law = 4.0 * df / m.gamma();
            assert!((d.degradation / law - 1.0).abs() < 0.02, "{factor}: {} vs {law}", d.degradation);
        }
    }
}
