use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::flux::{response_flux, FluxMethod};
use super::geometry::{LoopGeometry, LoopShape, PickupCoil};
use crate::error::{Error, Result};
use crate::field::QuadrupoleField;
use crate::sphere::{solve_coefficients, SphereParams};
use crate::Vec3;

/// Default finite-difference step for the sphere offset (m).
pub const DEFAULT_STEP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> Vec3 {
        match self {
            Axis::X => Vec3::x(),
            Axis::Y => Vec3::y(),
            Axis::Z => Vec3::z(),
        }
    }
}

/// Settings of the quadrature coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericCoupling {
    pub method: FluxMethod,
    /// Static sphere offset from the trap centre about which to linearise.
    pub base_offset: Vec3,
    pub step: f64,
}

impl Default for NumericCoupling {
    fn default() -> Self {
        NumericCoupling {
            method: FluxMethod::Surface,
            base_offset: Vec3::zeros(),
            step: DEFAULT_STEP,
        }
    }
}

/// Coupling `ν = ∂Φ_loop/∂d` (Wb/m) where `d` displaces the trap and loop
/// together along `axis` relative to the sphere.
pub fn coupling_nu_numeric(qf: &QuadrupoleField, sphere: &SphereParams, lp: &LoopGeometry, axis: Axis) -> Result<f64> {
    coupling_nu_numeric_with(qf, sphere, lp, axis, &NumericCoupling::default())
}

pub fn coupling_nu_numeric_with(
    qf: &QuadrupoleField,
    sphere: &SphereParams,
    lp: &LoopGeometry,
    axis: Axis,
    settings: &NumericCoupling,
) -> Result<f64> {
    crate::error::ensure_positive("step", settings.step)?;
    let e = axis.unit();
    let flux = |s: f64| {
        let sol = solve_coefficients(qf, settings.base_offset + e * s, sphere);
        response_flux(&sol, lp, settings.method)
    };
    let central = |h: f64| -> Result<f64> { Ok((flux(h)? - flux(-h)?) / (2.0 * h)) };
    let h = settings.step;
    // sphere displacement +s is assembly displacement -s
    let d = (4.0 * central(0.5 * h)? - central(h)?) / 3.0;
    Ok(-d)
}

/// Closed-form coupling of one coaxial turn of radius `r_p` at height `z_p`
/// above the sphere centre (Wb/m).
pub fn coupling_nu_analytic(b_z: f64, radius: f64, r_p: f64, z_p: f64) -> Result<f64> {
    let rho_sq = r_p * r_p + z_p * z_p;
    let r_sq = radius * radius;
    if rho_sq <= r_sq {
        return Err(Error::LoopInsideSphere { rho_sq, r_sq });
    }
    let q = r_sq / rho_sq;
    Ok(PI * b_z * r_p * r_p * q.powf(1.5) * (1.0 - q * (1.0 - 5.0 * z_p * z_p / rho_sq)))
}

/// Sum of per-turn couplings. Coaxial turns use the closed form for the
/// axial direction; every other case goes through the flux quadrature.
pub fn coil_coupling(qf: &QuadrupoleField, sphere: &SphereParams, coil: &PickupCoil, axis: Axis) -> Result<f64> {
    coil.turns
        .iter()
        .map(|t| turn_coupling(qf, sphere, t, axis))
        .sum()
}

fn turn_coupling(qf: &QuadrupoleField, sphere: &SphereParams, lp: &LoopGeometry, axis: Axis) -> Result<f64> {
    match (&lp.shape, axis) {
        (LoopShape::CoaxialCircle { radius, height }, Axis::Z) => {
            let distance = lp.distance_to(Vec3::zeros());
            if distance <= sphere.radius() {
                return Err(Error::LoopIntersectsSphere {
                    distance,
                    sphere_radius: sphere.radius(),
                });
            }
            Ok(lp.sense.sign() * coupling_nu_analytic(qf.b_z(), sphere.radius(), *radius, *height)?)
        }
        _ => coupling_nu_numeric(qf, sphere, lp, axis),
    }
}

/// Couplings along all three axes for an arbitrary loop assembly, always by
/// quadrature.
pub fn assembly_coupling(
    qf: &QuadrupoleField,
    sphere: &SphereParams,
    loops: &[LoopGeometry],
    settings: &NumericCoupling,
) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (slot, axis) in out.iter_mut().zip([Axis::X, Axis::Y, Axis::Z]) {
        for lp in loops {
            *slot += coupling_nu_numeric_with(qf, sphere, lp, axis, settings)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pickup::{Sense, SpacingConvention};

    fn setup() -> (QuadrupoleField, SphereParams) {
        (QuadrupoleField::new(57.0, 90.0), SphereParams::new(50e-6, 10.9e3).unwrap())
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let (qf, s) = setup();
        for &(rp, zp) in &[(50e-6, 50e-6), (20e-6, 60e-6), (120e-6, 80e-6), (10e-6, -70e-6), (200e-6, 20e-6)] {
            let lp = LoopGeometry::coaxial_circle(rp, zp).unwrap();
            let a = coupling_nu_analytic(qf.b_z(), s.radius(), rp, zp).unwrap();
            for method in [FluxMethod::Surface, FluxMethod::LineIntegral] {
                let settings = NumericCoupling {
                    method,
                    ..Default::default()
                };
                let n = coupling_nu_numeric_with(&qf, &s, &lp, Axis::Z, &settings).unwrap();
                assert!((n - a).abs() < 1e-6 * a.abs(), "rp={rp} zp={zp} {method:?}: {n} vs {a}");
            }
        }
    }

    #[test]
    fn closed_form_vanishes_with_loop_radius() {
        let v = coupling_nu_analytic(147.0, 50e-6, 1e-12, 60e-6).unwrap();
        assert!(v.abs() < 1e-20);
        assert!(matches!(
            coupling_nu_analytic(147.0, 50e-6, 30e-6, 30e-6),
            Err(Error::LoopInsideSphere { .. })
        ));
    }

    #[test]
    fn coupling_decays_with_distance() {
        let (qf, s) = setup();
        let nu = |z: f64| coupling_nu_numeric(&qf, &s, &LoopGeometry::coaxial_circle(50e-6, z).unwrap(), Axis::Z).unwrap();
        let near = nu(100e-6);
        let far = nu(5e-3);
        // far field falls as Z^-3: (2/100)^3 times the near-field enhancement
        assert!(far.abs() < 1e-5 * near.abs(), "{far} {near}");
        let farther = nu(10e-3);
        assert!((far / farther - 8.0).abs() < 0.01 * 8.0, "{}", far / farther);
    }

    #[test]
    fn symmetric_gradiometer_cancels_axial_coupling() {
        let (qf, s) = setup();
        let up = LoopGeometry::coaxial_circle(60e-6, 80e-6).unwrap();
        let down = LoopGeometry::coaxial_circle(60e-6, -80e-6).unwrap().with_sense(Sense::Negative);
        let nu = assembly_coupling(&qf, &s, &[up.clone(), down], &NumericCoupling::default()).unwrap();
        let single = coupling_nu_numeric(&qf, &s, &up, Axis::Z).unwrap();
        assert!(nu[2].abs() < 1e-9 * single.abs(), "{nu:?}");
    }

    #[test]
    fn coil_sums_turns() {
        let (qf, s) = setup();
        let single = PickupCoil::planar_spiral(30e-6, 60e-6, 1, 1e-6, 1e-6, SpacingConvention::Gap).unwrap();
        let one = coil_coupling(&qf, &s, &single, Axis::Z).unwrap();
        assert_eq!(one, coupling_nu_analytic(qf.b_z(), 50e-6, 30.5e-6, 60e-6).unwrap());
        let doubled = PickupCoil::from_loops(vec![single.turns[0].clone(); 2], 1e-6, 1e-6, 30e-6).unwrap();
        assert_eq!(coil_coupling(&qf, &s, &doubled, Axis::Z).unwrap(), 2.0 * one);
    }

    #[test]
    fn scale_invariance() {
        let (qf, s) = setup();
        let nu1 = coupling_nu_analytic(qf.b_z(), s.radius(), 40e-6, 70e-6).unwrap();
        let k: f64 = 3.7;
        let nu2 = coupling_nu_analytic(2.0 * qf.b_z(), k * s.radius(), k * 40e-6, k * 70e-6).unwrap();
        let a = nu1 / (qf.b_z() * s.radius().powi(2));
        let b = nu2 / (2.0 * qf.b_z() * (k * s.radius()).powi(2));
        assert!((a - b).abs() < 1e-13 * a.abs());
    }
}
