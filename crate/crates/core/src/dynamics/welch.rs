use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            // periodic form, exact for overlapping segments
            Window::Hann => (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect(),
            Window::Rectangular => vec![1.0; n],
        }
    }
}

/// One-sided power spectral density on `f_k = k · df`, `k = 0..=n/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Psd {
    pub df: f64,
    pub psd: Vec<f64>,
    pub segments: usize,
}

impl Psd {
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.df
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.psd.len()).map(|k| self.frequency(k)).collect()
    }

    /// `Σ psd · df` over bins with `low ≤ f ≤ high`.
    pub fn integrate(&self, low: f64, high: f64) -> f64 {
        self.psd
            .iter()
            .enumerate()
            .filter(|(k, _)| (low..=high).contains(&self.frequency(*k)))
            .map(|(_, p)| p * self.df)
            .sum()
    }

    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.df
    }

    /// Index of the largest bin inside the band.
    pub fn peak(&self, low: f64, high: f64) -> Option<usize> {
        (0..self.psd.len())
            .filter(|&k| (low..=high).contains(&self.frequency(k)))
            .max_by(|&a, &b| self.psd[a].total_cmp(&self.psd[b]))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "f_Hz,psd")?;
        for (k, p) in self.psd.iter().enumerate() {
            writeln!(w, "{:e},{:e}", self.frequency(k), p)?;
        }
        Ok(())
    }
}

/// Welch estimate with per-segment mean removal and density scaling
/// `2 |X_k|² / (f_s Σ w²)`; the DC and Nyquist bins are not doubled.
pub fn welch_psd(samples: &[f64], fs: f64, segment: usize, overlap: usize, window: Window) -> Result<Psd> {
    crate::error::ensure_positive("welch.fs", fs)?;
    if segment < 2 || segment > samples.len() {
        return Err(Error::InvalidParameter {
            name: "welch.segment",
            reason: format!("segment length {segment} must lie in [2, {}]", samples.len()),
        });
    }
    if overlap >= segment {
        return Err(Error::InvalidParameter {
            name: "welch.overlap",
            reason: "overlap must be shorter than the segment".into(),
        });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: "samples must be finite".into(),
        });
    }
    let w = window.weights(segment);
    let wss: f64 = w.iter().map(|v| v * v).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment);
    let hop = segment - overlap;
    let bins = segment / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment];
    let mut count = 0;
    let mut start = 0;
    while start + segment <= samples.len() {
        let chunk = &samples[start..start + segment];
        let mean = chunk.iter().sum::<f64>() / segment as f64;
        for ((b, x), wi) in buf.iter_mut().zip(chunk).zip(&w) {
            *b = Complex64::new((x - mean) * wi, 0.0);
        }
        fft.process(&mut buf);
        for (a, z) in acc.iter_mut().zip(&buf) {
            *a += z.norm_sqr();
        }
        count += 1;
        start += hop;
    }
    let scale = 2.0 / (fs * wss * count as f64);
    let mut psd: Vec<f64> = acc.iter().map(|a| a * scale).collect();
    psd[0] *= 0.5;
    if segment.is_multiple_of(2) {
        psd[bins - 1] *= 0.5;
    }
    Ok(Psd {
        df: fs / segment as f64,
        psd,
        segments: count,
    })
}
