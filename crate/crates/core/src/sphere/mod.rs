//! Magnetostatic response of an ideal (zero penetration depth)
//! superconducting sphere in a displaced quadrupole field.

mod force;
mod harmonics;
mod multipole;

pub use force::{
    force_analytic, force_stress_tensor, gravity_sag, gravity_sag_with, stiffness, trap_frequencies,
    StressTensorForce,
};
pub use harmonics::{irregular_solid_harmonic, irregular_solid_harmonic_gradient};
pub use multipole::{solve_coefficients, MultipoleSolution};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// Radius (m) and density (kg/m^3) of the levitated sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SphereParamsRaw", into = "SphereParamsRaw")]
pub struct SphereParams {
    radius: f64,
    density: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereParamsRaw {
    #[serde(rename = "R")]
    radius: f64,
    rho: f64,
}

impl TryFrom<SphereParamsRaw> for SphereParams {
    type Error = crate::Error;
    fn try_from(raw: SphereParamsRaw) -> Result<Self> {
        SphereParams::new(raw.radius, raw.rho)
    }
}

impl From<SphereParams> for SphereParamsRaw {
    fn from(s: SphereParams) -> Self {
        SphereParamsRaw {
            radius: s.radius,
            rho: s.density,
        }
    }
}

impl SphereParams {
    pub fn new(radius: f64, density: f64) -> Result<Self> {
        ensure_positive("sphere.R", radius)?;
        ensure_positive("sphere.rho", density)?;
        Ok(SphereParams { radius, density })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * std::f64::consts::PI * self.radius.powi(3)
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sphere_mass() {
        // 100 µm diameter lead-tin sphere, quoted as 5.6 µg
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        assert!((s.mass() - 5.707e-9).abs() < 1e-11);
    }

    #[test]
    fn invalid_parameters_name_the_key() {
        let e = SphereParams::new(-1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("sphere.R"));
        let e = SphereParams::new(1.0, 0.0).unwrap_err();
        assert!(e.to_string().contains("sphere.rho"));
    }
}
