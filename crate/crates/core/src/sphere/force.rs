use std::f64::consts::PI;

use serde::Serialize;

use super::{MultipoleSolution, SphereParams};
use crate::constants::{MU_0, STANDARD_GRAVITY};
use crate::error::{ensure_positive, Error, Result};
use crate::field::QuadrupoleField;
use crate::quadrature::gauss_legendre;
use crate::Vec3;

/// Closed-form force `-(3V / 2μ0) (b_x² x0, b_y² y0, b_z² z0)` (N).
pub fn force_analytic(qf: &QuadrupoleField, offset: Vec3, sphere: &SphereParams) -> Vec3 {
    let [bx, by, bz] = qf.gradients();
    let k = -1.5 * sphere.volume() / MU_0;
    Vec3::new(k * bx * bx * offset.x, k * by * by * offset.y, k * bz * bz * offset.z)
}

/// Spring constants `-∂F_i/∂x0_i` (N/m) of the force law.
pub fn stiffness(qf: &QuadrupoleField, sphere: &SphereParams) -> [f64; 3] {
    let k = 1.5 * sphere.volume() / MU_0;
    qf.gradients().map(|b| k * b * b)
}

/// Force from the Maxwell stress integrated over the sphere surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StressTensorForce {
    pub force: Vec3,
    /// Rounding-level bound: machine epsilon times the integral of |integrand|.
    pub noise_floor: f64,
    pub nodes: usize,
}

/// `F = -∮ |B|²/(2μ0) n̂ dS` with a product rule: `nodes_per_axis`
/// Gauss–Legendre nodes in cos θ times `nodes_per_axis` trapezoid nodes in φ.
/// On the surface the total field is tangential, so this is the full stress.
pub fn force_stress_tensor(
    sol: &MultipoleSolution,
    sphere: &SphereParams,
    nodes_per_axis: usize,
) -> Result<StressTensorForce> {
    if nodes_per_axis < 16 {
        return Err(Error::InvalidParameter {
            name: "n_quadrature",
            reason: format!("need at least 16 nodes per axis, got {nodes_per_axis}"),
        });
    }
    let r = sphere.radius();
    let (ct, wt) = gauss_legendre(nodes_per_axis);
    let dphi = 2.0 * PI / nodes_per_axis as f64;
    let mut force = Vec3::zeros();
    let mut magnitude = 0.0;
    for (c, w) in ct.iter().zip(&wt) {
        let s = (1.0 - c * c).sqrt();
        for j in 0..nodes_per_axis {
            let phi = j as f64 * dphi;
            let n = Vec3::new(s * phi.cos(), s * phi.sin(), *c);
            let b = sol.total_field(n * r)?;
            let pressure = b.norm_squared() / (2.0 * MU_0);
            let weight = w * dphi * r * r;
            force -= n * (pressure * weight);
            magnitude += pressure * weight;
        }
    }
    Ok(StressTensorForce {
        force,
        noise_floor: 64.0 * f64::EPSILON * magnitude,
        nodes: nodes_per_axis * nodes_per_axis,
    })
}

/// Centre-of-mass frequencies `f_i = sqrt(3 / (8π² μ0 ρ)) |b_i|` (Hz).
pub fn trap_frequencies(qf: &QuadrupoleField, density: f64) -> Result<[f64; 3]> {
    ensure_positive("rho", density)?;
    let k = (3.0 / (8.0 * PI * PI * MU_0 * density)).sqrt();
    Ok(qf.gradients().map(|b| k * b.abs()))
}

/// Equilibrium shift below the field zero, `-g / (2π f_z)²` with g = 9.81 m/s².
pub fn gravity_sag(f_z: f64) -> Result<f64> {
    gravity_sag_with(f_z, STANDARD_GRAVITY)
}

pub fn gravity_sag_with(f_z: f64, g: f64) -> Result<f64> {
    if !(f_z.is_finite() && f_z > 0.0) {
        return Err(Error::ZeroFrequency);
    }
    let w = 2.0 * PI * f_z;
    Ok(-g / (w * w))
}
