use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::noise::{NoiseSpec, OscillatorMode};

/// Stochastic integrator of the equation of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Exact Ornstein–Uhlenbeck half-steps for friction and bath around a
    /// kick by the remaining forces and an exact harmonic rotation.
    #[default]
    Splitting,
    /// Semi-implicit (symplectic) Euler–Maruyama.
    SemiImplicitEuler,
}

/// Band-pass applied to the measured coordinate before differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bandpass {
    /// Hz.
    pub center: f64,
    /// Hz.
    pub width: f64,
}

/// Direct feedback: force `-m Γ u` with `u` the (filtered, phase-shifted)
/// velocity estimate of the measured coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeedbackConfig {
    pub enabled: bool,
    /// Γ (1/s).
    pub gain: f64,
    pub bandpass: Option<Bandpass>,
    /// Phase shift (rad) mixing velocity and position estimates.
    pub phase: f64,
    /// Delay between measurement and applied force, in steps.
    pub latency_steps: usize,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        FeedbackConfig {
            enabled: false,
            gain: 0.0,
            bandpass: None,
            phase: 0.0,
            latency_steps: 1,
        }
    }
}

fn default_record_every() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub mode: OscillatorMode,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub feedback: FeedbackConfig,
    /// s.
    pub dt: f64,
    /// s.
    pub duration: f64,
    pub seed: u64,
    /// Initial position (m) and velocity (m/s).
    #[serde(default)]
    pub initial: [f64; 2],
    #[serde(default)]
    pub integrator: Integrator,
    /// Keep every n-th step in the output.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Spectral runs must cover at least 100 periods.
    #[serde(default)]
    pub spectral: bool,
}

impl SimConfig {
    pub fn new(mode: OscillatorMode, dt: f64, duration: f64, seed: u64) -> Self {
        SimConfig {
            mode,
            noise: NoiseSpec::default(),
            feedback: FeedbackConfig::default(),
            dt,
            duration,
            seed,
            initial: [0.0, 0.0],
            integrator: Integrator::default(),
            record_every: 1,
            spectral: false,
        }
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("sim.dt", self.dt)?;
        ensure_positive("sim.duration", self.duration)?;
        let f0 = self.mode.f0();
        if self.dt > 1.0 / (50.0 * f0) * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "sim.dt",
                reason: format!("dt = {} s exceeds 1/(50 f0) = {} s", self.dt, 1.0 / (50.0 * f0)),
            });
        }
        if self.spectral && self.duration < 100.0 / f0 {
            return Err(Error::InvalidParameter {
                name: "sim.duration",
                reason: format!("spectral runs need at least 100 periods ({} s)", 100.0 / f0),
            });
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "sim.record_every",
                reason: "must be at least 1".into(),
            });
        }
        if self.initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sim.initial",
                reason: "initial state must be finite".into(),
            });
        }
        self.noise.validate()?;
        if self.feedback.enabled {
            ensure_non_negative("feedback.gain", self.feedback.gain)?;
            if !self.feedback.phase.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "feedback.phase",
                    reason: "must be finite".into(),
                });
            }
            if let Some(bp) = self.feedback.bandpass {
                ensure_positive("feedback.bandpass.center", bp.center)?;
                ensure_positive("feedback.bandpass.width", bp.width)?;
                if bp.center >= 0.5 / self.dt {
                    return Err(Error::InvalidParameter {
                        name: "feedback.bandpass.center",
                        reason: "centre must lie below the Nyquist frequency".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// SHA-256 of the JSON serialisation, as lowercase hex.
pub fn config_digest(config: &SimConfig) -> String {
    let json = serde_json::to_vec(config).expect("configuration serialises");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seed of worker `index` derived from `master`: the first output word of
/// ChaCha8 seeded with `master` on stream `index + 1`. Stream 0 is never
/// used for derived seeds, so a derived seed never equals the master stream.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index + 1);
    rng.next_u64()
}
