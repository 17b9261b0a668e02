use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::QuadrupoleField;
use crate::constants::MU_0;
use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::golden_section_min;
use crate::Vec3;

/// Relative tolerance of the periodic trapezoid rule over a filament.
pub const FILAMENT_REL_TOL: f64 = 1e-10;
const FILAMENT_START_NODES: usize = 512;
const FILAMENT_MAX_NODES: usize = 1 << 20;
const MIN_FILAMENT_DISTANCE: f64 = 1e-9;

/// One elliptical current loop in a plane of constant `z`, centred on the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticFilament {
    pub semi_x: f64,
    pub semi_y: f64,
    pub z: f64,
    pub current: f64,
}

impl EllipticFilament {
    /// Distance from `p` to the filament curve.
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let dist2 = |t: f64| {
            let dx = p.x - self.semi_x * t.cos();
            let dy = p.y - self.semi_y * t.sin();
            dx * dx + dy * dy
        };
        let coarse = 720;
        let step = 2.0 * PI / coarse as f64;
        let (best_i, _) = (0..coarse)
            .map(|i| (i, dist2(i as f64 * step)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let t0 = best_i as f64 * step;
        let (_, d2) = golden_section_min(dist2, t0 - step, t0 + step, 1e-13);
        (d2 + (p.z - self.z).powi(2)).sqrt()
    }

    /// Biot–Savart field of the filament at `p`, by the periodic trapezoid
    /// rule with node doubling until the relative change is below
    /// [`FILAMENT_REL_TOL`].
    pub fn field_at(&self, p: Vec3) -> Vec3 {
        if self.current == 0.0 {
            return Vec3::zeros();
        }
        let kernel = |t: f64| -> Vec3 {
            let (s, c) = t.sin_cos();
            let r = Vec3::new(self.semi_x * c, self.semi_y * s, self.z);
            let dl = Vec3::new(-self.semi_x * s, self.semi_y * c, 0.0);
            let d = p - r;
            let n = d.norm();
            dl.cross(&d) / (n * n * n)
        };
        let prefactor = MU_0 * self.current / (4.0 * PI);
        let mut n = FILAMENT_START_NODES;
        let mut sum: Vec3 = (0..n).map(|j| kernel(2.0 * PI * j as f64 / n as f64)).sum();
        let mut estimate = sum * (2.0 * PI / n as f64) * prefactor;
        while n < FILAMENT_MAX_NODES {
            let mid: Vec3 = (0..n)
                .map(|j| kernel(2.0 * PI * (j as f64 + 0.5) / n as f64))
                .sum();
            sum += mid;
            n *= 2;
            let refined = sum * (2.0 * PI / n as f64) * prefactor;
            let change = (refined - estimate).norm();
            estimate = refined;
            if change <= FILAMENT_REL_TOL * refined.norm() {
                break;
            }
        }
        estimate
    }
}

/// Per-turn winding displacement relative to the nominal filament.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindingOffset {
    /// Added to both semi-axes (m).
    pub radial: f64,
    /// Moves the turn away from the mid-plane (m); mirrored for the lower coil.
    pub axial: f64,
}

/// Two coaxial elliptical coils at `z = ±separation/2`.
///
/// Without winding offsets each coil is a single filament carrying
/// `turns × current`; with offsets every turn is its own filament.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilPair {
    /// Semi-axis along x (m).
    pub semi_axis_x: f64,
    /// Semi-axis along y (m).
    pub semi_axis_y: f64,
    /// Axial distance between the two coil planes (m).
    pub separation: f64,
    pub turns: u32,
    /// Current in the coil at `+separation/2` (A), positive counter-clockwise seen from +z.
    pub current_upper: f64,
    /// Current in the coil at `-separation/2` (A).
    pub current_lower: f64,
    #[serde(default)]
    pub winding_offsets: Vec<WindingOffset>,
}

impl CoilPair {
    /// Anti-Helmholtz pair of circular coils.
    pub fn circular(radius: f64, separation: f64, turns: u32, current: f64) -> Result<Self> {
        Self::elliptical(radius, radius, separation, turns, current)
    }

    /// Anti-Helmholtz pair of elliptical coils (`current` in the upper coil,
    /// `-current` in the lower one).
    pub fn elliptical(
        semi_axis_x: f64,
        semi_axis_y: f64,
        separation: f64,
        turns: u32,
        current: f64,
    ) -> Result<Self> {
        let pair = CoilPair {
            semi_axis_x,
            semi_axis_y,
            separation,
            turns,
            current_upper: current,
            current_lower: -current,
            winding_offsets: Vec::new(),
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn with_winding_offsets(mut self, offsets: Vec<WindingOffset>) -> Result<Self> {
        self.winding_offsets = offsets;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("semi_axis_x", self.semi_axis_x)?;
        ensure_positive("semi_axis_y", self.semi_axis_y)?;
        ensure_positive("separation", self.separation.abs())?;
        if self.turns < 1 {
            return Err(Error::InvalidParameter {
                name: "turns",
                reason: "at least one turn is required".into(),
            });
        }
        if !(self.current_upper.is_finite() && self.current_lower.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "current",
                reason: "currents must be finite".into(),
            });
        }
        if !self.winding_offsets.is_empty() {
            if self.winding_offsets.len() != self.turns as usize {
                return Err(Error::InvalidParameter {
                    name: "winding_offsets",
                    reason: format!(
                        "{} offsets given for {} turns",
                        self.winding_offsets.len(),
                        self.turns
                    ),
                });
            }
            for w in &self.winding_offsets {
                if self.semi_axis_x + w.radial <= 0.0 || self.semi_axis_y + w.radial <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "winding_offsets",
                        reason: format!("radial offset {} collapses the turn", w.radial),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_anti_helmholtz(&self) -> bool {
        self.current_upper * self.current_lower < 0.0
    }

    /// Same geometry and currents with every length multiplied by `factor`.
    pub fn scaled_geometry(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.semi_axis_x *= factor;
        out.semi_axis_y *= factor;
        out.separation *= factor;
        for w in &mut out.winding_offsets {
            w.radial *= factor;
            w.axial *= factor;
        }
        out
    }

    /// Same geometry with both currents multiplied by `factor`.
    pub fn scaled_current(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.current_upper *= factor;
        out.current_lower *= factor;
        out
    }

    pub fn filaments(&self) -> Vec<EllipticFilament> {
        let half = 0.5 * self.separation.abs();
        let mut out = Vec::new();
        if self.winding_offsets.is_empty() {
            let n = self.turns as f64;
            for (z, current) in [(half, self.current_upper), (-half, self.current_lower)] {
                out.push(EllipticFilament {
                    semi_x: self.semi_axis_x,
                    semi_y: self.semi_axis_y,
                    z,
                    current: n * current,
                });
            }
        } else {
            for w in &self.winding_offsets {
                for (sign, current) in [(1.0, self.current_upper), (-1.0, self.current_lower)] {
                    out.push(EllipticFilament {
                        semi_x: self.semi_axis_x + w.radial,
                        semi_y: self.semi_axis_y + w.radial,
                        z: sign * (half + w.axial),
                        current,
                    });
                }
            }
        }
        out
    }
}

/// Field of the coil pair at `point`, summed over all filaments.
pub fn biot_savart_field(coils: &CoilPair, point: Vec3) -> Result<Vec3> {
    let filaments = coils.filaments();
    for f in &filaments {
        let d = f.distance_to(point);
        if d <= MIN_FILAMENT_DISTANCE {
            return Err(Error::PointOnFilament { distance: d });
        }
    }
    Ok(filaments.iter().map(|f| f.field_at(point)).sum())
}

/// Trap gradients read off the coil field at the symmetry centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientExtraction {
    /// Trace-free gradients after renormalisation.
    pub field: QuadrupoleField,
    /// Raw finite-difference gradients `∂B_i/∂x_i` (T/m).
    pub raw: [f64; 3],
    /// `(b_x + b_y + b_z) / max|b_i|` before renormalisation.
    pub trace_residual: f64,
    /// Finite-difference step used (m).
    pub step: f64,
}

/// Gradient extraction with the default step of 1 µm, shrunk for coils
/// smaller than a millimetre.
pub fn extract_gradients(coils: &CoilPair) -> Result<GradientExtraction> {
    let scale = coils
        .semi_axis_x
        .min(coils.semi_axis_y)
        .min(0.5 * coils.separation.abs());
    extract_gradients_with_step(coils, (1e-3 * scale).min(1e-6))
}

/// Central differences of the Biot–Savart field at the origin with one
/// Richardson extrapolation step (`h` and `h/2`).
pub fn extract_gradients_with_step(coils: &CoilPair, h: f64) -> Result<GradientExtraction> {
    coils.validate()?;
    if !coils.is_anti_helmholtz() {
        return Err(Error::NotAntiHelmholtz {
            upper: coils.current_upper,
            lower: coils.current_lower,
        });
    }
    ensure_positive("step", h)?;
    let mut raw = [0.0; 3];
    for (i, g) in raw.iter_mut().enumerate() {
        let central = |step: f64| -> Result<f64> {
            let mut e = Vec3::zeros();
            e[i] = step;
            let plus = biot_savart_field(coils, e)?;
            let minus = biot_savart_field(coils, -e)?;
            Ok((plus[i] - minus[i]) / (2.0 * step))
        };
        let coarse = central(h)?;
        let fine = central(0.5 * h)?;
        *g = (4.0 * fine - coarse) / 3.0;
    }
    let scale = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let trace = raw.iter().sum::<f64>();
    let trace_residual = if scale > 0.0 { trace / scale } else { 0.0 };
    let shift = trace / 3.0;
    let field = QuadrupoleField::new(raw[0] - shift, raw[1] - shift);
    Ok(GradientExtraction {
        field,
        raw,
        trace_residual,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_axis_loop(radius: f64, current: f64, z: f64) -> f64 {
        MU_0 * current * radius * radius / (2.0 * (radius * radius + z * z).powf(1.5))
    }

    #[test]
    fn single_loop_on_axis_matches_closed_form() {
        let f = EllipticFilament {
            semi_x: 2e-3,
            semi_y: 2e-3,
            z: 0.5e-3,
            current: 3.0,
        };
        for z in [-4e-3, 0.0, 1.3e-3, 1e-2] {
            let b = f.field_at(Vec3::new(0.0, 0.0, z));
            let exact = on_axis_loop(2e-3, 3.0, z - 0.5e-3);
            assert!((b.z - exact).abs() < 1e-8 * exact.abs(), "z={z}");
            assert!(b.x.abs() < 1e-12 * exact && b.y.abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn zero_current_gives_zero_field() {
        let pair = CoilPair::circular(1e-3, 1e-3, 10, 0.0).unwrap();
        let b = biot_savart_field(&pair, Vec3::new(1e-4, 2e-4, 3e-4)).unwrap();
        assert_eq!(b, Vec3::zeros());
    }

    #[test]
    fn anti_helmholtz_centre_is_field_free() {
        let (a, i) = (1.5e-3, 2.0);
        let pair = CoilPair::circular(a, 1.2e-3, 1, i).unwrap();
        let b = biot_savart_field(&pair, Vec3::zeros()).unwrap();
        assert!(b.norm() < 1e-12 * MU_0 * i / a);
    }

    #[test]
    fn point_on_filament_is_rejected() {
        let pair = CoilPair::elliptical(2e-3, 1e-3, 2e-3, 1, 1.0).unwrap();
        let p = Vec3::new(2e-3 * 0.3f64.cos(), 1e-3 * 0.3f64.sin(), 1e-3);
        assert!(matches!(biot_savart_field(&pair, p), Err(Error::PointOnFilament { .. })));
    }

    #[test]
    fn same_sign_currents_are_not_a_gradient_pair() {
        let mut pair = CoilPair::circular(1e-3, 1e-3, 1, 1.0).unwrap();
        pair.current_lower = 1.0;
        assert!(matches!(extract_gradients(&pair), Err(Error::NotAntiHelmholtz { .. })));
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        assert!(CoilPair::circular(-1e-3, 1e-3, 1, 1.0).is_err());
        assert!(CoilPair::circular(1e-3, 0.0, 1, 1.0).is_err());
        assert!(CoilPair::circular(1e-3, 1e-3, 0, 1.0).is_err());
        let pair = CoilPair::circular(1e-3, 1e-3, 2, 1.0).unwrap();
        assert!(pair.with_winding_offsets(vec![WindingOffset::default()]).is_err());
    }

    #[test]
    fn winding_offsets_without_displacement_match_lumped_turns() {
        let lumped = CoilPair::circular(1e-3, 1e-3, 3, 1.0).unwrap();
        let split = lumped
            .clone()
            .with_winding_offsets(vec![WindingOffset::default(); 3])
            .unwrap();
        let p = Vec3::new(1e-4, -2e-4, 3e-4);
        let a = biot_savart_field(&lumped, p).unwrap();
        let b = biot_savart_field(&split, p).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }
}
