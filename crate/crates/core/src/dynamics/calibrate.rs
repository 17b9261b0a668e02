use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};

/// Relative uncertainty of the optically calibrated displacement.
pub const DISPLACEMENT_CALIBRATION_UNCERTAINTY: f64 = 0.13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    /// Φ₀/m.
    pub eta: f64,
    /// Absolute uncertainty of `eta` (Φ₀/m).
    pub uncertainty: f64,
    pub flux_rms: f64,
    pub displacement_rms: f64,
}

struct BandPower {
    rms: f64,
}

fn band_power(x: &[f64], fs: f64, low: f64, high: f64, channel: &'static str) -> Result<BandPower> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let df = fs / n as f64;
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for (k, z) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
        let f = k as f64 * df;
        if (low..=high).contains(&f) {
            inside.push(z.norm_sqr());
        } else {
            outside.push(z.norm_sqr());
        }
    }
    if inside.is_empty() {
        return Err(Error::BandTooNarrow {
            low,
            high,
            bins: 0,
            needed: 1,
        });
    }
    let in_sum: f64 = inside.iter().sum();
    let in_mean = in_sum / inside.len() as f64;
    if !outside.is_empty() {
        outside.sort_by(f64::total_cmp);
        let median = outside[outside.len() / 2];
        if !(in_mean > median) {
            return Err(Error::BandMismatch { channel });
        }
    } else if !(in_mean > 0.0) {
        return Err(Error::BandMismatch { channel });
    }
    // one-sided Parseval: variance = 2 Σ|X_k|² / n²
    Ok(BandPower {
        rms: (2.0 * in_sum).sqrt() / n as f64,
    })
}

/// Flux-to-displacement coupling from simultaneous records: the ratio of the
/// band-limited rms values.
pub fn calibrate_coupling(flux: &[f64], displacement: &[f64], fs: f64, low: f64, high: f64) -> Result<Calibration> {
    ensure_positive("calibration.fs", fs)?;
    if flux.len() != displacement.len() || flux.len() < 4 {
        return Err(Error::InvalidParameter {
            name: "calibration.series",
            reason: "flux and displacement records must have equal length of at least 4".into(),
        });
    }
    if !(high > low) || low < 0.0 {
        return Err(Error::InvalidParameter {
            name: "calibration.band",
            reason: format!("invalid band [{low}, {high}] Hz"),
        });
    }
    let f = band_power(flux, fs, low, high, "flux")?;
    let d = band_power(displacement, fs, low, high, "displacement")?;
    let eta = f.rms / d.rms;
    Ok(Calibration {
        eta,
        uncertainty: DISPLACEMENT_CALIBRATION_UNCERTAINTY * eta,
        flux_rms: f.rms,
        displacement_rms: d.rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    fn tone(n: usize, fs: f64) -> Vec<f64> {
        (0..n).map(|k| 2e-9 * (2.0 * PI * 212.0 * k as f64 / fs).sin()).collect()
    }

    #[test]
    fn constructed_ratio_recovered() {
        let fs = 2000.0;
        let d = tone(1 << 14, fs);
        let f: Vec<f64> = d.iter().map(|v| 13e3 * v).collect();
        let c = calibrate_coupling(&f, &d, fs, 200.0, 225.0).unwrap();
        assert!((c.eta / 13e3 - 1.0).abs() < 1e-12);
        assert!((c.uncertainty / c.eta - 0.13).abs() < 1e-15);
        assert!((c.displacement_rms / (2e-9 / 2f64.sqrt()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn measurement_noise_tolerated() {
        let fs = 2000.0;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = tone(1 << 16, fs);
        let sig = 13e3 * 2e-9 / 2f64.sqrt();
        let f: Vec<f64> = d
            .iter()
            .map(|v| 13e3 * v + 0.1 * sig * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let c = calibrate_coupling(&f, &d, fs, 200.0, 225.0).unwrap();
        assert!((c.eta / 13e3 - 1.0).abs() < 0.02, "{}", c.eta);
    }

    #[test]
    fn empty_band_is_mismatch() {
        let fs = 2000.0;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = tone(1 << 12, fs);
        let noise: Vec<f64> = (0..1 << 12).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        assert!(matches!(
            calibrate_coupling(&noise, &d, fs, 600.0, 700.0),
            Err(Error::BandMismatch { .. })
        ));
    }
}
