use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// First-order RL low-pass with cutoff rate `κ = R_C / L_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlFilter {
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterResponse {
    pub frequency: f64,
    pub kappa: f64,
    pub amplitude: f64,
    /// `20 log₁₀(amplitude)`.
    pub amplitude_db: f64,
    pub psd_attenuation: f64,
    /// `20 log₁₀(amplitude²)`: the squared transfer function quoted on the
    /// amplitude scale, twice `amplitude_db`.
    pub psd_db: f64,
}

impl RlFilter {
    pub fn new(r_c: f64, l_c: f64) -> Result<Self> {
        ensure_positive("R_C", r_c)?;
        ensure_positive("L_C", l_c)?;
        Ok(RlFilter { kappa: r_c / l_c })
    }

    pub fn from_kappa(kappa: f64) -> Result<Self> {
        ensure_positive("kappa", kappa)?;
        Ok(RlFilter { kappa })
    }

    /// `κ / sqrt(κ² + ω²)`.
    pub fn amplitude(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f;
        self.kappa / self.kappa.hypot(w)
    }

    pub fn response(&self, f: f64) -> FilterResponse {
        let a = self.amplitude(f);
        FilterResponse {
            frequency: f,
            kappa: self.kappa,
            amplitude: a,
            amplitude_db: 20.0 * a.log10(),
            psd_attenuation: a * a,
            psd_db: 20.0 * (a * a).log10(),
        }
    }

    /// Unit-step response `1 − exp(−κ t)`.
    pub fn step_response(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.kappa * t).exp_m1()
        }
    }
}

pub fn rl_filter(r_c: f64, l_c: f64, f: f64) -> Result<FilterResponse> {
    Ok(RlFilter::new(r_c, l_c)?.response(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_passes_and_squares_agree() {
        let f = RlFilter::from_kappa(0.036).unwrap();
        let r = f.response(0.0);
        assert_eq!(r.amplitude, 1.0);
        assert_eq!(r.amplitude_db, 0.0);
        let r = f.response(200.0);
        assert_eq!(r.psd_attenuation, r.amplitude * r.amplitude);
        assert!((r.psd_db - 2.0 * r.amplitude_db).abs() < 1e-12 * r.psd_db.abs());
    }

    #[test]
    fn step_reaches_one_minus_inverse_e() {
        let f = RlFilter::from_kappa(0.036).unwrap();
        let tau: f64 = 1.0 / 0.036;
        assert!((tau - 27.78).abs() < 0.01);
        assert!((f.step_response(tau) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert_eq!(f.step_response(-1.0), 0.0);
    }
}
