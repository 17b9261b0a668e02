use std::f64::consts::PI;

use super::oscillator::OscillatorMode;
use crate::constants::K_B;
use crate::error::{ensure_non_negative, ensure_positive, Result};
use crate::sphere::SphereParams;

/// Geometric factor of free-molecular gas damping on a sphere.
pub const GAS_DAMPING_BETA: f64 = 1.8;

/// `sqrt(8 k_B T / (π m))` (m/s).
pub fn mean_thermal_speed(temperature: f64, molecule_mass: f64) -> Result<f64> {
    ensure_non_negative("T_gas", temperature)?;
    ensure_positive("molecule_mass", molecule_mass)?;
    Ok((8.0 * K_B * temperature / (PI * molecule_mass)).sqrt())
}

/// `γ_P = β P / (ρ R v̄_th)` (1/s).
pub fn gas_damping(pressure: f64, temperature: f64, molecule_mass: f64, sphere: &SphereParams) -> Result<f64> {
    ensure_non_negative("pressure", pressure)?;
    if pressure == 0.0 {
        return Ok(0.0);
    }
    let v = mean_thermal_speed(temperature, molecule_mass)?;
    ensure_positive("T_gas", temperature)?;
    Ok(GAS_DAMPING_BETA * pressure / (sphere.density() * sphere.radius() * v))
}

/// Worst-case damping by a normal-metal loop of inductance `l_o` threaded by
/// flux `∂φ · x`: `(∂φ)² / (2π m f L_o)` (1/s), reached at `R_o = 2π f L_o`.
pub fn eddy_damping(flux_gradient: f64, mode: &OscillatorMode, l_o: f64) -> Result<f64> {
    ensure_positive("L_o", l_o)?;
    Ok(flux_gradient * flux_gradient / (2.0 * PI * mode.mass() * mode.f0() * l_o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HELIUM_MASS;

    #[test]
    fn gas_damping_scalings() {
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        assert_eq!(gas_damping(0.0, 300.0, HELIUM_MASS, &s).unwrap(), 0.0);
        let a = gas_damping(1e-4, 300.0, HELIUM_MASS, &s).unwrap();
        let big = SphereParams::new(100e-6, 10.9e3).unwrap();
        let b = gas_damping(1e-4, 300.0, HELIUM_MASS, &big).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
        let v = mean_thermal_speed(300.0, HELIUM_MASS).unwrap();
        assert!((v - 1260.0).abs() < 1.0, "{v}");
    }

    #[test]
    fn eddy_damping_scalings() {
        let m = OscillatorMode::from_quality(5.6e-9, 100.0, 1e6, 0.0).unwrap();
        assert_eq!(eddy_damping(0.0, &m, 1e-8).unwrap(), 0.0);
        let a = eddy_damping(1e-11, &m, 1e-8).unwrap();
        let b = eddy_damping(1e-11, &m, 2e-8).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn optical_window_bound() {
        use crate::field::QuadrupoleField;
        use crate::pickup::coupling_nu_analytic;
        use crate::sphere::trap_frequencies;
        // 1 mm radius opening 20 mm from the sphere, coaxial with each mode axis
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        let qf = QuadrupoleField::new(57.0, 90.0);
        let f = trap_frequencies(&qf, s.density()).unwrap();
        for (b, fi) in [qf.b_x(), qf.b_y(), qf.b_z()].into_iter().zip(f) {
            let m = OscillatorMode::from_quality(s.mass(), fi, 2.6e7, 0.0).unwrap();
            let nu = coupling_nu_analytic(b.abs(), s.radius(), 1e-3, 20e-3).unwrap();
            let g = eddy_damping(nu, &m, 10e-9).unwrap();
            assert!(g < 1e-9, "{g:e} at {fi} Hz");
        }
    }
}
