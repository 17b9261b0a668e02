//! Physical constants, SI units throughout.

/// Vacuum permeability (H/m), CODATA 2018.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Magnetic flux quantum h/2e (Wb).
pub const PHI_0: f64 = 2.067_833_848e-15;
/// Standard gravitational acceleration used for sag and g-unit conversions (m/s^2).
pub const STANDARD_GRAVITY: f64 = 9.81;
/// Helium-4 atomic mass (kg).
pub const HELIUM_MASS: f64 = 6.646_477_3e-27;

/// Name, value and unit of every constant, in a stable order.
pub fn table() -> Vec<(&'static str, f64, &'static str)> {
    vec![
        ("mu_0", MU_0, "H/m"),
        ("k_B", K_B, "J/K"),
        ("hbar", HBAR, "J s"),
        ("Phi_0", PHI_0, "Wb"),
        ("g", STANDARD_GRAVITY, "m/s^2"),
        ("m_He", HELIUM_MASS, "kg"),
    ]
}
