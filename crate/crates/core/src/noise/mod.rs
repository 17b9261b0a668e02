//! Frequency-domain noise budgets of a levitated oscillator. All power
//! spectral densities are one-sided and per Hz.

mod budget;
mod curve;
mod damping;
mod filter;
mod oscillator;
mod quantum;
mod vibration;

pub use budget::{ground_state_budget, sensing_budget, vibration_budget, BudgetLine, BudgetReport};
pub use curve::{NoiseCurve, NoiseSpec};
pub use damping::{eddy_damping, gas_damping, mean_thermal_speed, GAS_DAMPING_BETA};
pub use filter::{rl_filter, FilterResponse, RlFilter};
pub use oscillator::{
    drift_averaged_sensitivity, force_sensitivity, noise_equivalent_temperature, susceptibility,
    thermal_acceleration_noise, thermal_force_noise, DriftAveraged, OscillatorMode,
};
pub use quantum::{
    cold_damping_gain, feedback_phonon_number, optimal_eta, sql_psd, FeedbackGain, PhononNumber,
};
pub use vibration::{
    effective_temperature, heating_rates, vibration_displacement_psd, vibration_energy, vibration_rms,
    vibration_teff, HeatingRates,
};
