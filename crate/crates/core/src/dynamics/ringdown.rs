use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::linear_fit;

/// Default number of demodulation blocks per record.
pub const DEFAULT_BLOCKS: usize = 50;
/// Fewest blocks on either side of a breakpoint.
pub const MIN_SEGMENT_BLOCKS: usize = 5;

/// Block-averaged amplitude of the tone near the demodulation frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    /// Block centre times (s).
    pub time: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// Refined carrier frequency (Hz).
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingdownFit {
    /// Hz.
    pub f0: f64,
    /// Energy decay rate (1/s).
    pub gamma: f64,
    pub q: f64,
    /// Standard error of `gamma`.
    pub gamma_sigma: f64,
    /// Rms residual of `ln(amplitude)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSegmentFit {
    pub single: RingdownFit,
    /// Time at which the decay rate changes (s).
    pub break_time: f64,
    pub gamma_before: f64,
    pub gamma_after: f64,
    /// Set when the two rates differ by more than 10% and five standard errors.
    pub jump: bool,
}

fn block_phasors(x: &[f64], dt: f64, f: f64, blocks: usize) -> (Vec<f64>, Vec<Complex64>) {
    let len = x.len() / blocks;
    let w = 2.0 * PI * f;
    (0..blocks)
        .map(|b| {
            let start = b * len;
            let mut z = Complex64::new(0.0, 0.0);
            for (k, v) in x[start..start + len].iter().enumerate() {
                let t = (start + k) as f64 * dt;
                z += v * Complex64::from_polar(1.0, -w * t);
            }
            ((start as f64 + 0.5 * len as f64) * dt, z * (2.0 / len as f64))
        })
        .unzip()
}

/// Largest periodogram bin within ±10% of `f_guess`, interpolated by a
/// parabola through the neighbouring log powers. Accurate to well below the
/// block bandwidth, so the block phase never advances by more than π.
fn spectral_peak(x: &[f64], dt: f64, f_guess: f64) -> f64 {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * dt);
    let lo = ((0.9 * f_guess / df).floor() as usize).max(1);
    let hi = ((1.1 * f_guess / df).ceil() as usize).min(n / 2 - 1);
    let power = |k: usize| buf[k].norm_sqr().max(f64::MIN_POSITIVE).ln();
    let Some(k) = (lo..=hi).max_by(|&a, &b| power(a).total_cmp(&power(b))) else {
        return f_guess;
    };
    let (a, b, c) = (power(k - 1), power(k), power(k + 1));
    let denom = a - 2.0 * b + c;
    let shift = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    (k as f64 + shift) * df
}

/// Quadrature demodulation in `blocks` equal blocks. The carrier starts at
/// the periodogram peak and is refined from the slope of the unwrapped
/// block phase.
pub fn demodulate(x: &[f64], dt: f64, f_guess: f64, blocks: usize) -> Result<Envelope> {
    ensure_positive("ringdown.dt", dt)?;
    ensure_positive("ringdown.f0", f_guess)?;
    if blocks < 2 * MIN_SEGMENT_BLOCKS || x.len() < blocks * 4 {
        return Err(Error::InvalidParameter {
            name: "ringdown.blocks",
            reason: format!("{} samples cannot form {blocks} blocks", x.len()),
        });
    }
    if f_guess >= 0.5 / dt {
        return Err(Error::InvalidParameter {
            name: "ringdown.f0",
            reason: "carrier lies above the Nyquist frequency".into(),
        });
    }
    let mut f = spectral_peak(x, dt, f_guess);
    for _ in 0..3 {
        let (t, z) = block_phasors(x, dt, f, blocks);
        let mut phase = Vec::with_capacity(z.len());
        let mut last = 0.0;
        for (i, zi) in z.iter().enumerate() {
            let mut p = zi.arg();
            if i > 0 {
                p += 2.0 * PI * ((last - p) / (2.0 * PI)).round();
            }
            phase.push(p);
            last = p;
        }
        let (_, slope, _) = linear_fit(&t, &phase);
        if !slope.is_finite() {
            break;
        }
        f += slope / (2.0 * PI);
    }
    let (time, z) = block_phasors(x, dt, f, blocks);
    Ok(Envelope {
        time,
        amplitude: z.iter().map(|v| v.norm()).collect(),
        frequency: f,
    })
}

/// `(slope, slope standard error, rms residual)` of `ln a` against `t`.
type LineFit = (f64, f64, f64);

fn log_fit(t: &[f64], a: &[f64]) -> LineFit {
    let y: Vec<f64> = a.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let (_, slope, rms) = linear_fit(t, &y);
    let n = t.len() as f64;
    let mean = t.iter().sum::<f64>() / n;
    let sxx: f64 = t.iter().map(|v| (v - mean).powi(2)).sum();
    let sigma = rms * (n / (n - 2.0)).sqrt() / sxx.sqrt();
    (slope, sigma, rms)
}

fn fit_envelope(env: &Envelope) -> Result<RingdownFit> {
    let (slope, sigma, rms) = log_fit(&env.time, &env.amplitude);
    if !(slope < 0.0) {
        return Err(Error::NoDecay { slope });
    }
    let gamma = -2.0 * slope;
    Ok(RingdownFit {
        f0: env.frequency,
        gamma,
        q: 2.0 * PI * env.frequency / gamma,
        gamma_sigma: 2.0 * sigma,
        residual: rms,
    })
}

/// Exponential fit to the demodulated envelope: `a(t) ∝ exp(−γt/2)`.
pub fn ringdown_q(x: &[f64], dt: f64, f_guess: f64) -> Result<RingdownFit> {
    fit_envelope(&demodulate(x, dt, f_guess, DEFAULT_BLOCKS)?)
}

/// Best two-piece exponential fit over every breakpoint that leaves at
/// least [`MIN_SEGMENT_BLOCKS`] blocks on each side.
pub fn ringdown_two_segment(x: &[f64], dt: f64, f_guess: f64) -> Result<TwoSegmentFit> {
    let env = demodulate(x, dt, f_guess, DEFAULT_BLOCKS)?;
    let single = fit_envelope(&env)?;
    let n = env.time.len();
    let mut best: Option<(f64, usize, [LineFit; 2])> = None;
    for b in MIN_SEGMENT_BLOCKS..=n - MIN_SEGMENT_BLOCKS {
        let left = log_fit(&env.time[..b], &env.amplitude[..b]);
        let right = log_fit(&env.time[b..], &env.amplitude[b..]);
        let rss = left.2.powi(2) * b as f64 + right.2.powi(2) * (n - b) as f64;
        if best.as_ref().is_none_or(|(r, _, _)| rss < *r) {
            best = Some((rss, b, [left, right]));
        }
    }
    let (_, b, [left, right]) = best.expect("record holds enough blocks");
    let (g1, g2) = (-2.0 * left.0, -2.0 * right.0);
    let sigma = 2.0 * (left.1.powi(2) + right.1.powi(2)).sqrt();
    let jump = (g1 - g2).abs() > (0.1 * g1.abs().max(g2.abs())).max(5.0 * sigma);
    Ok(TwoSegmentFit {
        single,
        break_time: 0.5 * (env.time[b - 1] + env.time[b]),
        gamma_before: g1,
        gamma_after: g2,
        jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(f0: f64, rates: &[(f64, f64)], fs: f64, n: usize) -> Vec<f64> {
        // piecewise rate: (start time, gamma)
        let mut ln_a: f64 = 0.0;
        let mut out = Vec::with_capacity(n);
        let dt = 1.0 / fs;
        for k in 0..n {
            let t = k as f64 * dt;
            let g = rates.iter().rev().find(|(s, _)| t >= *s).map_or(0.0, |r| r.1);
            out.push(1e-6 * ln_a.exp() * (2.0 * PI * f0 * t + 0.3).cos());
            ln_a -= 0.5 * g * dt;
        }
        out
    }

    #[test]
    fn noiseless_decay_recovered() {
        let x = decay(212.0, &[(0.0, 0.02)], 2000.0, 400_000);
        let fit = ringdown_q(&x, 5e-4, 211.8).unwrap();
        assert!((fit.gamma / 0.02 - 1.0).abs() < 1e-3, "{}", fit.gamma);
        assert!((fit.f0 - 212.0).abs() < 1e-6, "{}", fit.f0);
        assert!((fit.q - 2.0 * PI * 212.0 / fit.gamma).abs() < 1e-9 * fit.q);
    }

    #[test]
    fn growth_is_rejected() {
        let x = decay(50.0, &[(0.0, -0.1)], 1000.0, 50_000);
        assert!(matches!(ringdown_q(&x, 1e-3, 50.0), Err(Error::NoDecay { .. })));
    }

    #[test]
    fn rate_jump_is_flagged() {
        let x = decay(100.0, &[(0.0, 0.05), (100.0, 0.2)], 1000.0, 200_000);
        let two = ringdown_two_segment(&x, 1e-3, 100.0).unwrap();
        assert!(two.jump);
        assert!((two.break_time - 100.0).abs() < 5.0, "{}", two.break_time);
        assert!((two.gamma_before / 0.05 - 1.0).abs() < 0.05);
        let steady = decay(100.0, &[(0.0, 0.05)], 1000.0, 200_000);
        assert!(!ringdown_two_segment(&steady, 1e-3, 100.0).unwrap().jump);
    }
}
