use serde::Serialize;

use super::{biot_savart_field, extract_gradients, CoilPair, FieldSample, QuadrupoleField};
use crate::error::{Error, Result};
use crate::Vec3;

/// Deviation of a coil field from its quadrupole approximation inside a cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrupoleFit {
    pub field: QuadrupoleField,
    /// Maximum over samples of `|B_sim - B_quad| / |B_sim|`.
    pub max_relative: f64,
    /// Root mean square of the same ratio.
    pub rms_relative: f64,
    pub samples: usize,
}

/// Deterministic low-discrepancy points (Halton bases 2, 3, 5) filling the
/// cube `[-half_width, half_width]^3`. The origin is never returned.
pub fn halton_cube(half_width: f64, n: usize) -> Vec<Vec3> {
    fn radical_inverse(mut i: usize, base: usize) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    (1..=n)
        .map(|i| {
            Vec3::new(
                (2.0 * radical_inverse(i, 2) - 1.0) * half_width,
                (2.0 * radical_inverse(i, 3) - 1.0) * half_width,
                (2.0 * radical_inverse(i, 5) - 1.0) * half_width,
            )
        })
        .collect()
}

/// `(max, rms)` of `|B_sample - B_quad| / |B_sample|` over samples with a
/// non-zero field; the quadrupole is centred at the origin.
pub fn relative_deviation(samples: &[FieldSample], qf: &QuadrupoleField) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for s in samples {
        let b = s.field();
        let norm = b.norm();
        if norm == 0.0 {
            continue;
        }
        let dev = (b - qf.field_at(Vec3::zeros(), s.position())).norm() / norm;
        max = max.max(dev);
        sum_sq += dev * dev;
        count += 1;
    }
    let rms = if count > 0 { (sum_sq / count as f64).sqrt() } else { 0.0 };
    (max, rms)
}

pub fn quadrupole_fit(coils: &CoilPair, cube_half_width: f64, n_samples: usize) -> Result<QuadrupoleFit> {
    if n_samples < 100 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("at least 100 samples are required, got {n_samples}"),
        });
    }
    crate::error::ensure_positive("cube_half_width", cube_half_width)?;
    let field = extract_gradients(coils)?.field;
    let samples = halton_cube(cube_half_width, n_samples)
        .into_iter()
        .map(|p| biot_savart_field(coils, p).map(|b| FieldSample::new(p, b)))
        .collect::<Result<Vec<_>>>()?;
    let (max_relative, rms_relative) = relative_deviation(&samples, &field);
    Ok(QuadrupoleFit {
        field,
        max_relative,
        rms_relative,
        samples: samples.len(),
    })
}

/// Maximum relative deviation `|B_sim - (b_x x, b_y y, b_z z)| / |B_sim|`
/// over `n_samples` points of the cube.
pub fn quadrupole_fit_rms(coils: &CoilPair, cube_half_width: f64, n_samples: usize) -> Result<f64> {
    quadrupole_fit(coils, cube_half_width, n_samples).map(|f| f.max_relative)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_quadrupole_samples_have_zero_deviation() {
        let qf = QuadrupoleField::new(57.0, 90.0);
        let samples: Vec<FieldSample> = halton_cube(1e-4, 200)
            .into_iter()
            .map(|p| FieldSample::new(p, qf.field_at(Vec3::zeros(), p)))
            .collect();
        assert_eq!(relative_deviation(&samples, &qf), (0.0, 0.0));
    }

    #[test]
    fn too_few_samples_rejected() {
        let pair = CoilPair::circular(2e-3, 2e-3, 1, 1.0).unwrap();
        assert!(quadrupole_fit_rms(&pair, 1e-4, 50).is_err());
    }

    #[test]
    fn halton_points_stay_in_cube() {
        let pts = halton_cube(2.0, 500);
        assert!(pts.iter().all(|p| p.amax() <= 2.0 && p.norm() > 0.0));
    }
}
