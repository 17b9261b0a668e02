//! Irregular solid harmonics `r^-(n+1) Y_n^m` for n <= 2, with orthonormal
//! complex spherical harmonics and the Condon–Shortley phase.
//!
//! Each is written as `P_nm(x, y, z) / r^(2n+1)` where `P_nm = r^n Y_n^m` is
//! a homogeneous polynomial, so gradients follow in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::Vec3;

type C3 = [Complex64; 3];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Regular solid harmonic `r^n Y_n^m` and its gradient.
fn regular(n: u32, m: i32, p: Vec3) -> (Complex64, C3) {
    let (x, y, z) = (p.x, p.y, p.z);
    let zero = c(0.0, 0.0);
    match (n, m) {
        (0, 0) => (c(0.5 / PI.sqrt(), 0.0), [zero; 3]),
        (1, 0) => {
            let k = (3.0 / (4.0 * PI)).sqrt();
            (c(k * z, 0.0), [zero, zero, c(k, 0.0)])
        }
        (1, 1) | (1, -1) => {
            let s = m.signum() as f64;
            let k = -s * (3.0 / (8.0 * PI)).sqrt();
            (c(k * x, k * s * y), [c(k, 0.0), c(0.0, k * s), zero])
        }
        (2, 0) => {
            let k = (5.0 / (16.0 * PI)).sqrt();
            (
                c(k * (2.0 * z * z - x * x - y * y), 0.0),
                [c(-2.0 * k * x, 0.0), c(-2.0 * k * y, 0.0), c(4.0 * k * z, 0.0)],
            )
        }
        (2, 1) | (2, -1) => {
            let s = m.signum() as f64;
            let k = -s * (15.0 / (8.0 * PI)).sqrt();
            (
                c(k * z * x, k * s * z * y),
                [c(k * z, 0.0), c(0.0, k * s * z), c(k * x, k * s * y)],
            )
        }
        (2, 2) | (2, -2) => {
            let s = (m / 2) as f64;
            let k = (15.0 / (32.0 * PI)).sqrt();
            let w = c(x, s * y);
            (
                k * w * w,
                [2.0 * k * w, 2.0 * k * w * c(0.0, s), zero],
            )
        }
        _ => (zero, [zero; 3]),
    }
}

/// `r^-(n+1) Y_n^m(θ, φ)` at a Cartesian point. Zero for unsupported degrees (n > 2).
pub fn irregular_solid_harmonic(n: u32, m: i32, p: Vec3) -> Complex64 {
    let r2 = p.norm_squared();
    let (poly, _) = regular(n, m, p);
    poly / r2.powf(n as f64 + 0.5)
}

/// Gradient of [`irregular_solid_harmonic`].
pub fn irregular_solid_harmonic_gradient(n: u32, m: i32, p: Vec3) -> [Complex64; 3] {
    let r2 = p.norm_squared();
    let (poly, grad) = regular(n, m, p);
    let inv = 1.0 / r2.powf(n as f64 + 0.5);
    let radial = -(2.0 * n as f64 + 1.0) * poly * inv / r2;
    [
        grad[0] * inv + radial * p.x,
        grad[1] * inv + radial * p.y,
        grad[2] * inv + radial * p.z,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spherical_harmonic_reference(n: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
        // Tabulated Y_n^m (Condon–Shortley), evaluated in angles.
        let (st, ct) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, m as f64 * phi);
        let val = match (n, m.abs()) {
            (1, 0) => (3.0 / (4.0 * PI)).sqrt() * ct,
            (1, 1) => -(3.0 / (8.0 * PI)).sqrt() * st,
            (2, 0) => (5.0 / (16.0 * PI)).sqrt() * (3.0 * ct * ct - 1.0),
            (2, 1) => -(15.0 / (8.0 * PI)).sqrt() * st * ct,
            (2, 2) => (15.0 / (32.0 * PI)).sqrt() * st * st,
            _ => unreachable!(),
        };
        // Y_n^{-m} = (-1)^m conj(Y_n^m)
        if m < 0 && m.abs() % 2 == 1 {
            -val * e
        } else {
            val * e
        }
    }

    #[test]
    fn matches_angular_table() {
        let (r, theta, phi): (f64, f64, f64) = (1.7, 0.8, 2.3);
        let p = Vec3::new(r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos());
        for n in 1..=2u32 {
            for m in -(n as i32)..=(n as i32) {
                let got = irregular_solid_harmonic(n, m, p);
                let want = spherical_harmonic_reference(n, m, theta, phi) / r.powi(n as i32 + 1);
                assert!((got - want).norm() < 1e-13, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = Vec3::new(0.3, -0.7, 0.5);
        let h = 1e-6;
        for n in 1..=2u32 {
            for m in -(n as i32)..=(n as i32) {
                let g = irregular_solid_harmonic_gradient(n, m, p);
                for i in 0..3 {
                    let mut e = Vec3::zeros();
                    e[i] = h;
                    let fd = (irregular_solid_harmonic(n, m, p + e) - irregular_solid_harmonic(n, m, p - e))
                        / (2.0 * h);
                    assert!((g[i] - fd).norm() < 1e-8, "n={n} m={m} i={i}");
                }
            }
        }
    }
}
