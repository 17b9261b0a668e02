//! Time-domain Langevin simulation of centre-of-mass modes with trap noise,
//! measurement noise and direct feedback, plus the spectral and ringdown
//! analyses applied to its output.

mod calibrate;
mod config;
mod filters;
mod heating;
mod lorentzian;
mod noise_gen;
mod ringdown;
mod simulate;
mod welch;

pub use calibrate::{calibrate_coupling, Calibration, DISPLACEMENT_CALIBRATION_UNCERTAINTY};
pub use config::{config_digest, split_seed, Bandpass, FeedbackConfig, Integrator, SimConfig};
pub use filters::Biquad;
pub use heating::{heating_validation, HeatingRow, HeatingSettings, HEATING_TOLERANCE};
pub use lorentzian::{lorentzian_fit, lorentzian_shape, LorentzianFit, MIN_FIT_BINS};
pub use noise_gen::{shaped_noise, white_noise_std};
pub use ringdown::{demodulate, ringdown_q, ringdown_two_segment, Envelope, RingdownFit, TwoSegmentFit};
pub use simulate::{simulate, simulate_sweep, SeriesMetadata, Simulator, TimeSeries};
pub use welch::{welch_psd, Psd, Window};
