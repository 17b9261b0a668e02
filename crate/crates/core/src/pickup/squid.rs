use serde::{Deserialize, Serialize};

use super::geometry::PickupCoil;
use super::wheeler::{wheeler_inductance, WheelerCoefficients};
use crate::constants::{HBAR, PHI_0};
use crate::error::{ensure_positive, Error, Result};

/// Raw circuit description. Either `k` or `mutual` may be given; `s_jj`
/// defaults to `s_phiphi / L_S²`, i.e. an effective inductance equal to `L_S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidParams {
    #[serde(rename = "L_S")]
    pub l_s: f64,
    #[serde(rename = "L_I")]
    pub l_i: f64,
    #[serde(rename = "L_W")]
    pub l_w: f64,
    #[serde(rename = "L_P")]
    pub l_p: f64,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(rename = "M", default)]
    pub mutual: Option<f64>,
    /// Flux noise PSD (Wb²/Hz).
    #[serde(rename = "S_phiphi")]
    pub s_phiphi: f64,
    /// Circulating-current noise PSD (A²/Hz).
    #[serde(rename = "S_JJ", default)]
    pub s_jj: Option<f64>,
}

/// Lumped SQUID readout: input coil, pickup and stray inductances and the
/// uncorrelated flux and current noise densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquidCircuit {
    l_s: f64,
    l_i: f64,
    l_w: f64,
    l_p: f64,
    k: f64,
    s_phiphi: f64,
    s_jj: f64,
}

impl TryFrom<SquidParams> for SquidCircuit {
    type Error = Error;

    fn try_from(p: SquidParams) -> Result<Self> {
        ensure_positive("squid.L_S", p.l_s)?;
        ensure_positive("squid.L_I", p.l_i)?;
        ensure_positive("squid.L_W", p.l_w)?;
        ensure_positive("squid.L_P", p.l_p)?;
        ensure_positive("squid.S_phiphi", p.s_phiphi)?;
        let k = match (p.k, p.mutual) {
            (Some(k), None) => k,
            (None, Some(m)) => m / (p.l_i * p.l_s).sqrt(),
            _ => {
                return Err(Error::InvalidParameter {
                    name: "squid.k",
                    reason: "exactly one of k and M must be given".into(),
                })
            }
        };
        if !(k.is_finite() && k.abs() < 1.0 && k != 0.0) {
            return Err(Error::InvalidParameter {
                name: "squid.k",
                reason: format!("coupling constant must satisfy 0 < |k| < 1, got {k}"),
            });
        }
        let s_jj = p.s_jj.unwrap_or(p.s_phiphi / (p.l_s * p.l_s));
        ensure_positive("squid.S_JJ", s_jj)?;
        let product = (p.s_phiphi * s_jj).sqrt();
        // the limit is a strict physical bound; allow rounding at equality
        if product < HBAR * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter {
                name: "squid.S_JJ",
                reason: format!(
                    "sqrt(S_phiphi S_JJ) = {:.4} hbar is below the quantum limit",
                    product / HBAR
                ),
            });
        }
        Ok(SquidCircuit {
            l_s: p.l_s,
            l_i: p.l_i,
            l_w: p.l_w,
            l_p: p.l_p,
            k,
            s_phiphi: p.s_phiphi,
            s_jj,
        })
    }
}

impl SquidCircuit {
    pub fn new(params: SquidParams) -> Result<Self> {
        params.try_into()
    }

    pub fn l_s(&self) -> f64 {
        self.l_s
    }
    pub fn l_i(&self) -> f64 {
        self.l_i
    }
    pub fn l_w(&self) -> f64 {
        self.l_w
    }
    pub fn l_p(&self) -> f64 {
        self.l_p
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn s_phiphi(&self) -> f64 {
        self.s_phiphi
    }
    pub fn s_jj(&self) -> f64 {
        self.s_jj
    }

    /// `M = k sqrt(L_I L_S)` (H).
    pub fn mutual(&self) -> f64 {
        self.k * (self.l_i * self.l_s).sqrt()
    }

    /// Total inductance of the flux transformer loop `L_P + L_I + L_W`.
    pub fn loop_inductance(&self) -> f64 {
        self.l_p + self.l_i + self.l_w
    }

    /// Energy resolution `S_EE = S_φφ / (2 L_S)` (J/Hz).
    pub fn energy_resolution(&self) -> f64 {
        self.s_phiphi / (2.0 * self.l_s)
    }

    /// `sqrt(S_φφ / S_JJ)` (H).
    pub fn effective_inductance(&self) -> f64 {
        (self.s_phiphi / self.s_jj).sqrt()
    }

    /// `sqrt(S_φφ S_JJ)` (J s).
    pub fn noise_product(&self) -> f64 {
        (self.s_phiphi * self.s_jj).sqrt()
    }

    pub fn with_pickup_inductance(mut self, l_p: f64) -> Result<Self> {
        ensure_positive("squid.L_P", l_p)?;
        self.l_p = l_p;
        Ok(self)
    }
}

/// `η = ν M / (L_P + L_I + L_W)` (Wb/m).
pub fn squid_coupling(nu: f64, circuit: &SquidCircuit) -> f64 {
    nu * circuit.mutual() / circuit.loop_inductance()
}

/// Shorthand `η = ν (M/L)` when only the transformer ratio is known.
pub fn squid_coupling_ratio(nu: f64, m_over_l: f64) -> f64 {
    nu * m_over_l
}

/// Position noise `S_nn = S_φφ / η²` (m²/Hz) with the circuit's own `L_P`.
pub fn measurement_noise(nu: f64, circuit: &SquidCircuit) -> Result<f64> {
    if nu == 0.0 || !nu.is_finite() {
        return Err(Error::ZeroCoupling);
    }
    let l = circuit.loop_inductance();
    Ok(2.0 * circuit.energy_resolution() / (circuit.k * circuit.k) * l * l / (nu * nu * circuit.l_i))
}

/// Position noise with `L_P` taken from the Wheeler estimate for `coil`.
pub fn measurement_noise_for_coil(
    nu: f64,
    coil: &PickupCoil,
    circuit: &SquidCircuit,
    coefficients: WheelerCoefficients,
) -> Result<f64> {
    let c = circuit.with_pickup_inductance(wheeler_inductance(coil, coefficients))?;
    measurement_noise(nu, &c)
}

/// `S_nn = S_φφ / η²` with `η` in Φ₀/m and `sqrt_s_phiphi` in Φ₀/√Hz.
pub fn displacement_noise_from_eta(sqrt_s_phiphi_phi0: f64, eta_phi0_per_m: f64) -> Result<f64> {
    if eta_phi0_per_m == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let s = sqrt_s_phiphi_phi0 * PHI_0;
    let eta = eta_phi0_per_m * PHI_0;
    Ok(s * s / (eta * eta))
}
