use serde::Serialize;

use super::oscillator::{susceptibility, OscillatorMode};
use crate::constants::{HBAR, K_B};
use crate::pickup::SquidCircuit;

/// Measured displacement PSD `S_φφ/η² + |χ|²(S_FF^th + η² S_JJ)` (m²/Hz) for
/// coupling `eta` (Wb/m).
pub fn sql_psd(mode: &OscillatorMode, circuit: &SquidCircuit, eta: f64, omega: f64) -> f64 {
    let chi2 = susceptibility(mode, omega).norm_sqr();
    let s_ff = 4.0 * K_B * mode.t0() * mode.mass() * mode.gamma();
    circuit.s_phiphi() / (eta * eta) + chi2 * (s_ff + eta * eta * circuit.s_jj())
}

/// Coupling that balances imprecision and back action,
/// `η² = sqrt(S_φφ / S_JJ) / |χ(ω)|` (Wb/m).
pub fn optimal_eta(mode: &OscillatorMode, circuit: &SquidCircuit, omega: f64) -> f64 {
    (circuit.effective_inductance() / susceptibility(mode, omega).norm()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedbackGain {
    /// Optimal cold-damping rate `η² / (m ω₀ L̃_S)` (1/s).
    pub gamma_fb: f64,
    /// False when the rate does not exceed the intrinsic damping tenfold.
    pub strong: bool,
}

pub fn cold_damping_gain(mode: &OscillatorMode, circuit: &SquidCircuit, eta: f64) -> FeedbackGain {
    let gamma_fb = eta * eta / (mode.mass() * mode.omega0() * circuit.effective_inductance());
    let strong = gamma_fb >= 10.0 * mode.gamma();
    if !strong {
        log::warn!(
            "feedback rate {gamma_fb:.3e} 1/s is not much larger than the intrinsic damping {:.3e} 1/s",
            mode.gamma()
        );
    }
    FeedbackGain { gamma_fb, strong }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhononNumber {
    /// `k_B T₀ m γ L̃_S / (ħ η²)`.
    pub thermal: f64,
    /// `½ (sqrt(S_φφ S_JJ)/ħ − 1)`.
    pub backaction: f64,
    pub total: f64,
}

/// Final occupation under optimal direct feedback with uncorrelated noise.
pub fn feedback_phonon_number(mode: &OscillatorMode, circuit: &SquidCircuit, eta: f64) -> PhononNumber {
    let thermal = K_B * mode.t0() * mode.mass() * mode.gamma() * circuit.effective_inductance() / (HBAR * eta * eta);
    let backaction = 0.5 * (circuit.noise_product() / HBAR - 1.0);
    PhononNumber {
        thermal,
        backaction,
        total: thermal + backaction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pickup::SquidParams;

    fn circuit(product_hbar: f64, l_tilde: f64) -> SquidCircuit {
        let p = product_hbar * HBAR;
        SquidCircuit::new(SquidParams {
            l_s: 15e-12,
            l_i: 0.5e-6,
            l_w: 1e-7,
            l_p: 1e-7,
            k: Some(0.8),
            mutual: None,
            s_phiphi: p * l_tilde,
            s_jj: Some(p / l_tilde),
        })
        .unwrap()
    }

    #[test]
    fn quantum_limited_zero_temperature_is_empty() {
        let m = OscillatorMode::from_quality(5.6e-9, 212.0, 1e6, 0.0).unwrap();
        let n = feedback_phonon_number(&m, &circuit(1.0, 15e-12), 1e-7);
        assert_eq!(n.thermal, 0.0);
        assert!(n.total.abs() < 1e-12);
    }

    #[test]
    fn sql_at_optimum() {
        let m = OscillatorMode::from_quality(5.6e-9, 212.0, 1e6, 0.0).unwrap();
        let c = circuit(1.0, 15e-12);
        let w = m.omega0();
        let eta = optimal_eta(&m, &c, w);
        let chi = susceptibility(&m, w).norm();
        let s = sql_psd(&m, &c, eta, w);
        assert!((s / (2.0 * chi * HBAR) - 1.0).abs() < 1e-12);
        for f in [0.5, 0.9, 1.1, 2.0] {
            assert!(sql_psd(&m, &c, f * eta, w) > s);
        }
    }

    #[test]
    fn weak_feedback_flagged() {
        let m = OscillatorMode::from_quality(5.6e-9, 212.0, 10.0, 0.0).unwrap();
        assert!(!cold_damping_gain(&m, &circuit(2.0, 15e-12), 1e-12).strong);
        assert!(cold_damping_gain(&m, &circuit(2.0, 15e-12), 1e-3).strong);
    }
}
