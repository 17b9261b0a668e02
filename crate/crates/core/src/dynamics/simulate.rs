use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{config_digest, split_seed, Integrator, SimConfig};
use super::filters::Biquad;
use super::noise_gen::{shaped_noise, white_noise_std};
use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::noise::{heating_rates, NoiseCurve};

/// Ratio of simulated to predicted energy that aborts a run.
const ENERGY_GROWTH_LIMIT: f64 = 1e6;
const ENERGY_CHECK_INTERVAL: usize = 4096;

// RNG streams per noise source
const STREAM_THERMAL: u64 = 0;
const STREAM_MEASUREMENT: u64 = 1;
const STREAM_TRAP: u64 = 2;
const STREAM_SPRING: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesMetadata {
    pub seed: u64,
    pub config_digest: String,
    pub f0: f64,
    pub steps: usize,
}

/// Uniformly sampled true and measured positions (m).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub sample_interval: f64,
    pub x: Vec<f64>,
    pub y_meas: Vec<f64>,
    pub metadata: SeriesMetadata,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.sample_interval
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.sample_interval
    }

    /// CSV with a `#`-prefixed metadata block and columns `t,x,y_meas`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# seed: {}", self.metadata.seed)?;
        writeln!(w, "# config_digest: {}", self.metadata.config_digest)?;
        writeln!(w, "# f0_Hz: {:e}", self.metadata.f0)?;
        writeln!(w, "# sample_interval_s: {:e}", self.sample_interval)?;
        writeln!(w, "t,x,y_meas")?;
        for i in 0..self.len() {
            writeln!(w, "{:e},{:e},{:e}", self.time(i), self.x[i], self.y_meas[i])?;
        }
        Ok(())
    }

    /// Reads the format written by [`TimeSeries::write_csv`]. Metadata lines
    /// are optional; the interval is taken from the first two time stamps.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let bad = |reason: String| Error::InvalidParameter {
            name: "series",
            reason,
        };
        let mut meta = SeriesMetadata {
            seed: 0,
            config_digest: String::new(),
            f0: f64::NAN,
            steps: 0,
        };
        let mut t = Vec::new();
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    let v = v.trim();
                    match k.trim() {
                        "seed" => meta.seed = v.parse().unwrap_or(0),
                        "config_digest" => meta.config_digest = v.to_string(),
                        "f0_Hz" => meta.f0 = v.parse().unwrap_or(f64::NAN),
                        _ => {}
                    }
                }
                continue;
            }
            if !header_seen {
                if line != "t,x,y_meas" {
                    return Err(bad(format!("expected header t,x,y_meas, got {line:?}")));
                }
                header_seen = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(bad(format!("line {}: expected 3 columns", lineno + 1)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| bad(format!("line {}: {e}", lineno + 1)))
            };
            t.push(parse(cols[0])?);
            x.push(parse(cols[1])?);
            y.push(parse(cols[2])?);
        }
        if t.len() < 2 {
            return Err(bad("need at least two samples".into()));
        }
        let dt = t[1] - t[0];
        if !(dt > 0.0) {
            return Err(bad("time stamps must increase".into()));
        }
        meta.steps = t.len();
        Ok(TimeSeries {
            sample_interval: dt,
            x,
            y_meas: y,
            metadata: meta,
        })
    }
}

enum Source {
    Silent,
    White { sd: f64, rng: Box<ChaCha8Rng> },
    Table { samples: Vec<f64> },
}

impl Source {
    fn new(curve: &NoiseCurve, steps: usize, dt: f64, mut rng: ChaCha8Rng) -> Self {
        if curve.is_zero() {
            return Source::Silent;
        }
        match curve {
            NoiseCurve::Constant(s) => Source::White {
                sd: white_noise_std(*s, dt),
                rng: Box::new(rng),
            },
            NoiseCurve::Table { .. } => Source::Table {
                samples: shaped_noise(curve, steps.max(1), dt, &mut rng),
            },
        }
    }

    fn sample(&mut self, k: usize) -> f64 {
        match self {
            Source::Silent => 0.0,
            Source::White { sd, rng } => *sd * rng.sample::<f64, _>(StandardNormal),
            Source::Table { samples } => samples[k % samples.len()],
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Step-wise integrator of
/// `ẍ = −ω₀²(1+δ)(x−ε) − γẋ − Γu + F_th/m`, where `u` is the velocity
/// estimate of the measured coordinate `x + n`.
pub struct Simulator {
    config: SimConfig,
    x: f64,
    v: f64,
    step: usize,
    thermal_rng: ChaCha8Rng,
    measurement: Source,
    trap: Source,
    spring: Source,
    bandpass: Option<Biquad>,
    previous_signal: Option<f64>,
    pending: VecDeque<f64>,
    energy_scale: EnergyScale,
}

struct EnergyScale {
    initial: f64,
    thermal: f64,
    heating_power: f64,
    growth_rate: f64,
}

impl EnergyScale {
    fn bound(&self, t: f64) -> f64 {
        let linear = self.initial + self.thermal + self.heating_power * t;
        ENERGY_GROWTH_LIMIT * linear * (self.growth_rate * t).exp() + f64::MIN_POSITIVE
    }
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let steps = config.steps();
        let dt = config.dt;
        let seed = config.seed;
        let mode = &config.mode;
        let m = mode.mass();
        let w0 = mode.omega0();
        let rates = heating_rates(mode, &config.noise.s_epseps, &config.noise.s_deltadelta);
        let fb = if config.feedback.enabled { config.feedback.gain } else { 0.0 };
        let [x0, v0] = config.initial;
        let energy_scale = EnergyScale {
            initial: 0.5 * m * (v0 * v0 + w0 * w0 * x0 * x0),
            thermal: K_B * mode.t0(),
            heating_power: rates.qdot_eps + 0.25 * m * fb * fb * w0 * w0 * config.noise.s_nn,
            growth_rate: (rates.gamma_delta - mode.gamma()).max(0.0),
        };
        let bandpass = match (config.feedback.enabled, config.feedback.bandpass) {
            (true, Some(bp)) => Some(Biquad::bandpass(bp.center, bp.width, 1.0 / dt)),
            _ => None,
        };
        Ok(Simulator {
            x: x0,
            v: v0,
            step: 0,
            thermal_rng: stream(seed, STREAM_THERMAL),
            measurement: Source::new(&NoiseCurve::Constant(config.noise.s_nn), steps, dt, stream(seed, STREAM_MEASUREMENT)),
            trap: Source::new(&config.noise.s_epseps, steps, dt, stream(seed, STREAM_TRAP)),
            spring: Source::new(&config.noise.s_deltadelta, steps, dt, stream(seed, STREAM_SPRING)),
            bandpass,
            previous_signal: None,
            pending: VecDeque::with_capacity(config.feedback.latency_steps + 1),
            energy_scale,
            config,
        })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.dt
    }

    /// Position (m) and velocity (m/s).
    pub fn state(&self) -> (f64, f64) {
        (self.x, self.v)
    }

    pub fn energy(&self) -> f64 {
        let m = self.config.mode.mass();
        let w0 = self.config.mode.omega0();
        0.5 * m * (self.v * self.v + w0 * w0 * self.x * self.x)
    }

    fn feedback_signal(&mut self, y: f64) -> f64 {
        let fb = &self.config.feedback;
        if !fb.enabled {
            return 0.0;
        }
        let s = match self.bandpass.as_mut() {
            Some(bq) => bq.process(y),
            None => y,
        };
        let sdot = self.previous_signal.map_or(0.0, |p| (s - p) / self.config.dt);
        self.previous_signal = Some(s);
        let wc = fb.bandpass.map_or(self.config.mode.omega0(), |bp| 2.0 * PI * bp.center);
        let (sin, cos) = fb.phase.sin_cos();
        self.pending.push_back(cos * sdot + sin * wc * s);
        if self.pending.len() > fb.latency_steps {
            self.pending.pop_front().unwrap_or(0.0)
        } else {
            0.0
        }
    }

    /// Advances one step; returns the measured coordinate at the start of
    /// the step.
    pub fn step(&mut self) -> Result<f64> {
        let k = self.step;
        let dt = self.config.dt;
        let mode = self.config.mode;
        let w0 = mode.omega0();
        let gamma = mode.gamma();
        let y = self.x + self.measurement.sample(k);
        let u = self.feedback_signal(y);
        let gain = if self.config.feedback.enabled { self.config.feedback.gain } else { 0.0 };
        let eps = self.trap.sample(k);
        let delta = self.spring.sample(k);
        let kick = w0 * w0 * eps - w0 * w0 * delta * (self.x - eps) - gain * u;
        let thermal_var = K_B * mode.t0() / mode.mass();
        match self.config.integrator {
            Integrator::Splitting => {
                let c = (-0.5 * gamma * dt).exp();
                let sd = (thermal_var * (1.0 - c * c)).sqrt();
                self.v = c * self.v + sd * self.thermal_rng.sample::<f64, _>(StandardNormal);
                self.v += dt * kick;
                let (s, cs) = (w0 * dt).sin_cos();
                let (x, v) = (self.x, self.v);
                self.x = x * cs + v / w0 * s;
                self.v = -x * w0 * s + v * cs;
                self.v = c * self.v + sd * self.thermal_rng.sample::<f64, _>(StandardNormal);
            }
            Integrator::SemiImplicitEuler => {
                let sd = (2.0 * thermal_var * gamma / dt).sqrt();
                let a = -w0 * w0 * self.x - gamma * self.v + kick + sd * self.thermal_rng.sample::<f64, _>(StandardNormal);
                self.v += a * dt;
                self.x += self.v * dt;
            }
        }
        self.step += 1;
        if !(self.x.is_finite() && self.v.is_finite()) || self.step.is_multiple_of(ENERGY_CHECK_INTERVAL) {
            let t = self.time();
            let bound = self.energy_scale.bound(t);
            let e = self.energy();
            if !(e <= bound) {
                return Err(Error::UnstableIntegration { time: t, energy: e, bound });
            }
        }
        Ok(y)
    }

    /// Runs to the configured duration, calling `observer(t, x, v, y_meas)`
    /// before every step.
    pub fn run<F: FnMut(f64, f64, f64, f64)>(&mut self, mut observer: F) -> Result<()> {
        let steps = self.config.steps();
        while self.step < steps {
            let (t, x, v) = (self.time(), self.x, self.v);
            let y = self.step()?;
            observer(t, x, v, y);
        }
        Ok(())
    }
}

/// Runs one configuration and records every `record_every`-th sample.
pub fn simulate(config: &SimConfig) -> Result<TimeSeries> {
    let every = config.record_every;
    let steps = config.steps();
    let mut sim = Simulator::new(config.clone())?;
    let mut x = Vec::with_capacity(steps / every + 1);
    let mut y_meas = Vec::with_capacity(steps / every + 1);
    let mut k = 0usize;
    sim.run(|_, xi, _, yi| {
        if k.is_multiple_of(every) {
            x.push(xi);
            y_meas.push(yi);
        }
        k += 1;
    })?;
    Ok(TimeSeries {
        sample_interval: config.dt * every as f64,
        x,
        y_meas,
        metadata: SeriesMetadata {
            seed: config.seed,
            config_digest: config_digest(config),
            f0: config.mode.f0(),
            steps,
        },
    })
}

/// Runs the configurations concurrently, replacing each seed with
/// `split_seed(master_seed, index)`. Output order follows input order.
pub fn simulate_sweep(configs: &[SimConfig], master_seed: u64) -> Vec<Result<TimeSeries>> {
    configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = c.clone();
            c.seed = split_seed(master_seed, i as u64);
            simulate(&c)
        })
        .collect()
}
