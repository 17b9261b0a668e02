use std::f64::consts::PI;

use serde::Serialize;

use super::welch::Psd;
use crate::error::{Error, Result};

/// Fewest bins a band may hold for a four-parameter fit.
pub const MIN_FIT_BINS: usize = 8;
const REWEIGHT_PASSES: usize = 4;
const LM_ITERATIONS: usize = 200;

/// Oscillator-response line `4γω₀² / ((ω₀² − ω²)² + γ²ω²)` in 1/Hz. Its
/// integral over `0 ≤ f < ∞` is exactly one.
pub fn lorentzian_shape(f: f64, f0: f64, gamma: f64) -> f64 {
    let w = 2.0 * PI * f;
    let w0 = 2.0 * PI * f0;
    let d = w0 * w0 - w * w;
    4.0 * gamma * w0 * w0 / (d * d + gamma * gamma * w * w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzianFit {
    /// Hz.
    pub f0: f64,
    /// Energy damping rate (1/s).
    pub gamma: f64,
    /// Integrated line power (PSD units × Hz).
    pub area: f64,
    pub background: f64,
    /// `γ/2π` (Hz).
    pub linewidth: f64,
    /// Set when `γ/2π < 2 df`: the width reflects the record length.
    pub resolution_limited: bool,
    /// Rms relative residual over the band.
    pub residual: f64,
    pub bins: usize,
}

struct Band<'a> {
    f: Vec<f64>,
    d: &'a [f64],
}

/// Weighted linear solve for `(area, background)` at fixed shape.
fn amplitudes(shape: &[f64], data: &[f64], w: &[f64]) -> (f64, f64) {
    let (mut sll, mut sl, mut s1, mut sld, mut sd) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((l, d), wi) in shape.iter().zip(data).zip(w) {
        sll += wi * l * l;
        sl += wi * l;
        s1 += wi;
        sld += wi * l * d;
        sd += wi * d;
    }
    let det = sll * s1 - sl * sl;
    if det > 0.0 {
        let a = (sld * s1 - sl * sd) / det;
        let b = (sll * sd - sl * sld) / det;
        if b >= 0.0 && a >= 0.0 {
            return (a, b);
        }
    }
    ((sld / sll).max(0.0), 0.0)
}

impl Band<'_> {
    fn residuals(&self, f0: f64, ln_gamma: f64, w: &[f64]) -> (Vec<f64>, f64, f64) {
        let gamma = ln_gamma.exp();
        let shape: Vec<f64> = self.f.iter().map(|&f| lorentzian_shape(f, f0, gamma)).collect();
        let (a, b) = amplitudes(&shape, self.d, w);
        let r = shape
            .iter()
            .zip(self.d)
            .zip(w)
            .map(|((l, d), wi)| wi.sqrt() * (a * l + b - d))
            .collect();
        (r, a, b)
    }

    fn cost(&self, p: [f64; 2], w: &[f64]) -> f64 {
        self.residuals(p[0], p[1], w).0.iter().map(|r| r * r).sum()
    }
}

/// Levenberg–Marquardt on `(f₀, ln γ)` with the amplitudes projected out.
fn levenberg_marquardt(band: &Band, mut p: [f64; 2], w: &[f64], df: f64) -> [f64; 2] {
    let mut lambda = 1e-3;
    let mut cost = band.cost(p, w);
    for _ in 0..LM_ITERATIONS {
        let (r0, _, _) = band.residuals(p[0], p[1], w);
        let steps = [1e-6 * (p[1].exp() / (2.0 * PI)).max(df), 1e-6];
        let mut jac = [vec![0.0; r0.len()], vec![0.0; r0.len()]];
        for (j, h) in steps.iter().enumerate() {
            let mut q = p;
            q[j] += h;
            let (r1, _, _) = band.residuals(q[0], q[1], w);
            for (k, (a, b)) in r1.iter().zip(&r0).enumerate() {
                jac[j][k] = (a - b) / h;
            }
        }
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let jtj = [
            [dot(&jac[0], &jac[0]), dot(&jac[0], &jac[1])],
            [dot(&jac[1], &jac[0]), dot(&jac[1], &jac[1])],
        ];
        let jtr = [dot(&jac[0], &r0), dot(&jac[1], &r0)];
        let mut improved = false;
        while lambda < 1e12 {
            let a = [
                [jtj[0][0] * (1.0 + lambda), jtj[0][1]],
                [jtj[1][0], jtj[1][1] * (1.0 + lambda)],
            ];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let dp = [
                -(a[1][1] * jtr[0] - a[0][1] * jtr[1]) / det,
                -(a[0][0] * jtr[1] - a[1][0] * jtr[0]) / det,
            ];
            let q = [p[0] + dp[0], p[1] + dp[1]];
            let c = band.cost(q, w);
            if c.is_finite() && c < cost && q[0] > 0.0 {
                let rel = (cost - c) / cost;
                p = q;
                cost = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = rel > 1e-14;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}

/// Least-squares fit of `area · L(f; f₀, γ) + background` to the bins of
/// `psd` inside `[low, high]`, reweighted by the model so that every bin
/// carries equal relative weight.
pub fn lorentzian_fit(psd: &Psd, low: f64, high: f64) -> Result<LorentzianFit> {
    let idx: Vec<usize> = (0..psd.psd.len())
        .filter(|&k| (low..=high).contains(&psd.frequency(k)))
        .collect();
    if idx.len() < MIN_FIT_BINS {
        return Err(Error::BandTooNarrow {
            low,
            high,
            bins: idx.len(),
            needed: MIN_FIT_BINS,
        });
    }
    let (k0, k1) = (idx[0], idx[idx.len() - 1]);
    let data = &psd.psd[k0..=k1];
    let band = Band {
        f: (k0..=k1).map(|k| psd.frequency(k)).collect(),
        d: data,
    };
    let df = psd.df;

    // peak bin and half-maximum crossings
    let floor = {
        let mut s = data.to_vec();
        s.sort_by(f64::total_cmp);
        s[s.len() / 4]
    };
    let (ip, &peak) = data
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("band is non-empty");
    let half = floor + 0.5 * (peak - floor);
    let left = (0..ip).rev().find(|&k| data[k] < half).unwrap_or(0);
    let right = (ip..data.len()).find(|&k| data[k] < half).unwrap_or(data.len() - 1);
    let fwhm = ((right - left) as f64 - 1.0).max(0.5) * df;
    let mut p = [band.f[ip], (2.0 * PI * fwhm).ln()];

    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut w: Vec<f64> = data.iter().map(|d| 1.0 / (d * d).max(tiny)).collect();
    for _ in 0..REWEIGHT_PASSES {
        p = levenberg_marquardt(&band, p, &w, df);
        let (_, a, b) = band.residuals(p[0], p[1], &w);
        let gamma = p[1].exp();
        w = band
            .f
            .iter()
            .map(|&f| {
                let m = a * lorentzian_shape(f, p[0], gamma) + b;
                1.0 / (m * m).max(tiny)
            })
            .collect();
    }
    let gamma = p[1].exp();
    let (_, area, background) = band.residuals(p[0], p[1], &w);
    let residual = (band
        .f
        .iter()
        .zip(data)
        .map(|(&f, d)| {
            let m = area * lorentzian_shape(f, p[0], gamma) + background;
            ((d - m) / m).powi(2)
        })
        .sum::<f64>()
        / data.len() as f64)
        .sqrt();
    let linewidth = gamma / (2.0 * PI);
    Ok(LorentzianFit {
        f0: p[0],
        gamma,
        area,
        background,
        linewidth,
        resolution_limited: linewidth < 2.0 * df,
        residual,
        bins: data.len(),
    })
}
