use serde::{Deserialize, Serialize};

use super::geometry::PickupCoil;
use crate::constants::MU_0;

/// Coefficients `(K₁, K₂)` of the modified Wheeler expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WheelerCoefficients {
    pub k1: f64,
    pub k2: f64,
}

impl Default for WheelerCoefficients {
    fn default() -> Self {
        WheelerCoefficients { k1: 2.25, k2: 3.55 }
    }
}

/// `L_P = K₁ μ₀ N² d_avg / (1 + K₂ ρ_fill)` (H) for a planar spiral.
pub fn wheeler_inductance(coil: &PickupCoil, coefficients: WheelerCoefficients) -> f64 {
    let n = coil.n_turns() as f64;
    let (d_in, d_out) = coil.diameters();
    let d_avg = 0.5 * (d_in + d_out);
    let fill = (d_out - d_in) / (d_out + d_in);
    coefficients.k1 * MU_0 * n * n * d_avg / (1.0 + coefficients.k2 * fill)
}
