use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::noise::NoiseCurve;

/// Per-sample standard deviation of a white process with one-sided PSD
/// `psd` sampled every `dt`: `sqrt(psd / (2 dt))`.
pub fn white_noise_std(psd: f64, dt: f64) -> f64 {
    (psd / (2.0 * dt)).sqrt()
}

/// `n` samples of a stationary Gaussian process with one-sided PSD `curve`,
/// obtained by filtering white noise in the frequency domain over the whole
/// record (circular, so the record is periodic).
pub fn shaped_noise<R: Rng + ?Sized>(curve: &NoiseCurve, n: usize, dt: f64, rng: &mut R) -> Vec<f64> {
    if let NoiseCurve::Constant(s) = curve {
        let sd = white_noise_std(*s, dt);
        return (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
    }
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let fs = 1.0 / dt;
    for (j, z) in buf.iter_mut().enumerate() {
        let k = j.min(n - j);
        let f = k as f64 * fs / n as f64;
        *z *= (curve.eval(f) * fs / 2.0).sqrt();
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_table_matches_white_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dt = 1e-3;
        let table = NoiseCurve::table(vec![1.0, 100.0], vec![2e-6, 2e-6]).unwrap();
        let x = shaped_noise(&table, 1 << 16, dt, &mut rng);
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let expect = 2e-6 / (2.0 * dt);
        assert!((var / expect - 1.0).abs() < 0.03, "{var} {expect}");
    }
}
