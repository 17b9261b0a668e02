use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A one-sided PSD as a function of frequency in Hz: either a constant or a
/// table interpolated linearly in log-log space and held constant beyond
/// its ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum NoiseCurve {
    Constant(f64),
    Table { f_hz: Vec<f64>, psd: Vec<f64> },
}

impl Default for NoiseCurve {
    fn default() -> Self {
        NoiseCurve::Constant(0.0)
    }
}

impl NoiseCurve {
    pub fn constant(psd: f64) -> Result<Self> {
        let c = NoiseCurve::Constant(psd);
        c.validate("psd")?;
        Ok(c)
    }

    pub fn table(f_hz: Vec<f64>, psd: Vec<f64>) -> Result<Self> {
        let c = NoiseCurve::Table { f_hz, psd };
        c.validate("psd")?;
        Ok(c)
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidParameter { name, reason });
        match self {
            NoiseCurve::Constant(v) => {
                if !(v.is_finite() && *v >= 0.0) {
                    return bad(format!("density must be finite and non-negative, got {v}"));
                }
            }
            NoiseCurve::Table { f_hz, psd } => {
                if f_hz.is_empty() || f_hz.len() != psd.len() {
                    return bad(format!(
                        "table needs equal, non-zero lengths (f_hz: {}, psd: {})",
                        f_hz.len(),
                        psd.len()
                    ));
                }
                if f_hz.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
                    return bad("table frequencies must be positive".into());
                }
                if f_hz.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("table frequencies must be strictly increasing".into());
                }
                if psd.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return bad("table densities must be finite and non-negative".into());
                }
            }
        }
        Ok(())
    }

    /// Density at `f` Hz.
    pub fn eval(&self, f: f64) -> f64 {
        match self {
            NoiseCurve::Constant(v) => *v,
            NoiseCurve::Table { f_hz, psd } => {
                let n = f_hz.len();
                if f <= f_hz[0] {
                    return psd[0];
                }
                if f >= f_hz[n - 1] {
                    return psd[n - 1];
                }
                let i = f_hz.partition_point(|&x| x <= f) - 1;
                let (f0, f1, s0, s1) = (f_hz[i], f_hz[i + 1], psd[i], psd[i + 1]);
                if f == f0 {
                    return s0;
                }
                if s0 > 0.0 && s1 > 0.0 {
                    let t = (f / f0).ln() / (f1 / f0).ln();
                    (s0.ln() + t * (s1 / s0).ln()).exp()
                } else {
                    // a zero endpoint has no logarithm
                    s0 + (s1 - s0) * (f - f0) / (f1 - f0)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NoiseCurve::Constant(v) => *v == 0.0,
            NoiseCurve::Table { psd, .. } => psd.iter().all(|v| *v == 0.0),
        }
    }
}

/// Noise inputs of a budget or simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    /// Trap-centre displacement PSD (m²/Hz).
    pub s_epseps: NoiseCurve,
    /// Fractional spring-constant PSD (1/Hz).
    pub s_deltadelta: NoiseCurve,
    /// Measurement imprecision PSD (m²/Hz).
    pub s_nn: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        self.s_epseps.validate("noise.s_epseps")?;
        self.s_deltadelta.validate("noise.s_deltadelta")?;
        crate::error::ensure_non_negative("noise.s_nn", self.s_nn)
    }
}
