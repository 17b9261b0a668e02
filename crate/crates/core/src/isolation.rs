//! Vertical model of a multi-stage wire-pendulum vibration isolator: stage
//! springs, chain normal modes and the product-form transmissibility.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::constants::STANDARD_GRAVITY;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Young's modulus of type 304 stainless steel (Pa).
pub const DEFAULT_YOUNGS_MODULUS: f64 = 193e9;
/// Load ratio above which a stage is reported as marginal.
pub const YIELD_WARNING_RATIO: f64 = 0.5;

fn default_modulus() -> f64 {
    DEFAULT_YOUNGS_MODULUS
}

/// One plate hanging from `wires` identical wires attached to the stage above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    /// kg.
    pub mass: f64,
    pub wires: u32,
    /// Wire length (m).
    pub length: f64,
    /// Wire diameter (m).
    pub diameter: f64,
    #[serde(default = "default_modulus")]
    pub youngs_modulus: f64,
    /// Yield load per wire in kilograms-force.
    pub yield_load: f64,
}

impl Stage {
    pub fn new(mass: f64, wires: u32, length: f64, diameter: f64, yield_load: f64) -> Result<Self> {
        let s = Stage {
            mass,
            wires,
            length,
            diameter,
            youngs_modulus: DEFAULT_YOUNGS_MODULUS,
            yield_load,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_modulus(mut self, youngs_modulus: f64) -> Result<Self> {
        self.youngs_modulus = youngs_modulus;
        self.validate()?;
        Ok(self)
    }

    /// Masses may be zero here; the mode solver rejects them.
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("stage.mass", self.mass)?;
        if self.wires == 0 {
            return Err(Error::InvalidParameter {
                name: "stage.wires",
                reason: "a stage needs at least one wire".into(),
            });
        }
        ensure_positive("stage.length", self.length)?;
        ensure_positive("stage.diameter", self.diameter)?;
        ensure_positive("stage.youngs_modulus", self.youngs_modulus)?;
        ensure_positive("stage.yield_load", self.yield_load)
    }

    /// `k = N Y D² π / (4 L)` (N/m).
    pub fn spring_constant(&self) -> f64 {
        self.wires as f64 * self.youngs_modulus * self.diameter * self.diameter * PI / (4.0 * self.length)
    }

    /// Uncoupled vertical frequency `sqrt(k/m) / 2π` (Hz).
    pub fn frequency(&self) -> Result<f64> {
        if self.mass <= 0.0 {
            return Err(Error::SingularMass { stage: 0 });
        }
        Ok((self.spring_constant() / self.mass).sqrt() / (2.0 * PI))
    }

    /// Simple-pendulum horizontal frequency `sqrt(g/L) / 2π` (Hz).
    pub fn horizontal_frequency(&self) -> f64 {
        (STANDARD_GRAVITY / self.length).sqrt() / (2.0 * PI)
    }
}

pub fn stage_spring_constant(stage: &Stage) -> f64 {
    stage.spring_constant()
}

pub fn stage_frequency(stage: &Stage) -> Result<f64> {
    stage.frequency()
}

/// Stages ordered from the support (top) to the payload (bottom).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsolationStack {
    pub stages: Vec<Stage>,
}

impl IsolationStack {
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        let s = IsolationStack { stages };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::InvalidParameter {
                name: "isolation.stages",
                reason: "at least one stage is required".into(),
            });
        }
        self.stages.iter().try_for_each(Stage::validate)
    }

    /// Uncoupled stage frequencies (Hz), top to bottom.
    pub fn stage_frequencies(&self) -> Result<Vec<f64>> {
        self.stages
            .iter()
            .enumerate()
            .map(|(i, s)| s.frequency().map_err(|_| Error::SingularMass { stage: i }))
            .collect()
    }

    fn mass_weighted_chain(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.stages.len();
        for (i, s) in self.stages.iter().enumerate() {
            if s.mass <= 0.0 {
                return Err(Error::SingularMass { stage: i });
            }
        }
        let k: Vec<f64> = self.stages.iter().map(Stage::spring_constant).collect();
        let m: Vec<f64> = self.stages.iter().map(|s| s.mass).collect();
        // M^-1/2 K M^-1/2 with K_ii = k_i + k_{i+1}, K_{i,i+1} = -k_{i+1}
        let diag = (0..n)
            .map(|i| (k[i] + k.get(i + 1).copied().unwrap_or(0.0)) / m[i])
            .collect();
        let off = (0..n.saturating_sub(1))
            .map(|i| -k[i + 1] / (m[i] * m[i + 1]).sqrt())
            .collect();
        Ok((diag, off))
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm bisection,
/// ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = off.get(i).map_or(0.0, |v| v.abs()) + if i > 0 { off[i - 1].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (0..n)
        .map(|j| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, off, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= 1e-15 * a.abs().max(b.abs()) {
                    break;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Normal-mode frequencies of the vertical chain (Hz), ascending.
pub fn normal_modes(stack: &IsolationStack) -> Result<Vec<f64>> {
    stack.validate()?;
    let (diag, off) = stack.mass_weighted_chain()?;
    Ok(tridiagonal_eigenvalues(&diag, &off)
        .into_iter()
        .map(|w2| w2.max(0.0).sqrt() / (2.0 * PI))
        .collect())
}

/// Payload-to-support vertical transmissibility `∏ f_v,i² / |f_n,i² − f²|`.
/// At `f = 0` this is exactly one since `∏ f_n² = ∏ f_v²`.
pub fn transfer_function(stack: &IsolationStack, f: f64) -> Result<f64> {
    let fv = stack.stage_frequencies()?;
    let fn_ = normal_modes(stack)?;
    if f == 0.0 {
        return Ok(1.0);
    }
    for &mode in &fn_ {
        if (f - mode).abs() < 1e-9 * mode {
            return Err(Error::OnResonance { frequency: f, mode });
        }
    }
    Ok(fv
        .iter()
        .zip(&fn_)
        .map(|(v, n)| v * v / (n * n - f * f).abs())
        .product())
}

/// High-frequency asymptote `∏ f_v,i² / f^(2n)`.
pub fn transfer_asymptote(stack: &IsolationStack, f: f64) -> Result<f64> {
    let fv = stack.stage_frequencies()?;
    Ok(fv.iter().map(|v| v * v / (f * f)).product())
}

/// Writes `f_Hz,transmissibility`; resonant points are written as `inf`.
pub fn write_transmissibility_csv<W: Write>(stack: &IsolationStack, freqs: &[f64], mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidParameter {
        name: "output",
        reason: e.to_string(),
    };
    writeln!(w, "f_Hz,transmissibility").map_err(io)?;
    for &f in freqs {
        let t = match transfer_function(stack, f) {
            Ok(t) => t,
            Err(Error::OnResonance { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        writeln!(w, "{f:e},{t:e}").map_err(io)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YieldReport {
    pub stage: usize,
    /// Mass hanging from each wire of this stage (kg).
    pub load_per_wire: f64,
    pub ratio: f64,
    pub warning: bool,
}

/// Supported mass per wire divided by the yield load, per stage. Ratios
/// above one half are flagged; a ratio of one or more is an error.
pub fn yield_check(stack: &IsolationStack) -> Result<Vec<YieldReport>> {
    stack.validate()?;
    let n = stack.stages.len();
    let mut reports = Vec::with_capacity(n);
    let mut below = 0.0;
    for i in (0..n).rev() {
        let s = &stack.stages[i];
        below += s.mass;
        let load = below / s.wires as f64;
        let ratio = load / s.yield_load;
        if ratio >= 1.0 {
            return Err(Error::YieldExceeded { stage: i, ratio });
        }
        let warning = ratio > YIELD_WARNING_RATIO;
        if warning {
            log::warn!("isolation stage {i} carries {:.0}% of the wire yield load", 100.0 * ratio);
        }
        reports.push(YieldReport {
            stage: i,
            load_per_wire: load,
            ratio,
            warning,
        });
    }
    reports.reverse();
    Ok(reports)
}
