use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::harmonics::{irregular_solid_harmonic, irregular_solid_harmonic_gradient};
use super::SphereParams;
use crate::error::{Error, Result};
use crate::field::QuadrupoleField;
use crate::Vec3;

const INDEX: [(u32, i32); 8] = [(1, -1), (1, 0), (1, 1), (2, -2), (2, -1), (2, 0), (2, 1), (2, 2)];

fn slot(n: u32, m: i32) -> Option<usize> {
    INDEX.iter().position(|&k| k == (n, m))
}

/// Exterior scalar potential `Φ = Σ a_nm r^-(n+1) Y_n^m` of the screening
/// currents, in sphere-centred coordinates. Only degrees 1 and 2 can be
/// non-zero for a quadrupole source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultipoleSolution {
    coefficients: [Complex64; 8],
    offset: Vec3,
    source: QuadrupoleField,
    radius: f64,
}

/// Coefficients that cancel the radial applied field on the sphere surface
/// for a sphere at the origin and the quadrupole zero at `-offset`.
pub fn solve_coefficients(qf: &QuadrupoleField, offset: Vec3, sphere: &SphereParams) -> MultipoleSolution {
    let [bx, by, bz] = qf.gradients();
    let r3 = sphere.radius().powi(3);
    let r5 = sphere.radius().powi(5);
    let (x0, y0, z0) = (offset.x, offset.y, offset.z);
    let mut a = [Complex64::new(0.0, 0.0); 8];
    let s6 = (PI / 6.0).sqrt() * r3;
    a[slot(1, -1).unwrap()] = -s6 * Complex64::new(bx * x0, by * y0);
    a[slot(1, 0).unwrap()] = Complex64::new(-bz * (PI / 3.0).sqrt() * r3 * z0, 0.0);
    a[slot(1, 1).unwrap()] = s6 * Complex64::new(bx * x0, -by * y0);
    let quad = (by - bx) * (2.0 * PI / 135.0).sqrt() * r5;
    a[slot(2, -2).unwrap()] = Complex64::new(quad, 0.0);
    a[slot(2, 0).unwrap()] = Complex64::new(-bz * (4.0 * PI / 45.0).sqrt() * r5, 0.0);
    a[slot(2, 2).unwrap()] = Complex64::new(quad, 0.0);
    MultipoleSolution {
        coefficients: a,
        offset,
        source: *qf,
        radius: sphere.radius(),
    }
}

impl MultipoleSolution {
    /// `a_{n,m}` in T m^(n+2); zero for every index outside n ∈ {1, 2}.
    pub fn coefficient(&self, n: u32, m: i32) -> Complex64 {
        slot(n, m)
            .map(|i| self.coefficients[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn offset(&self) -> Vec3 {
        self.offset
    }

    pub fn source(&self) -> &QuadrupoleField {
        &self.source
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Checks `a_{n,-m} = (-1)^m conj(a_{n,m})`, the condition for a real potential.
    pub fn is_real_consistent(&self, tol: f64) -> bool {
        INDEX.iter().all(|&(n, m)| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            (self.coefficient(n, -m) - sign * self.coefficient(n, m).conj()).norm() <= tol
        })
    }

    /// Scalar potential Φ (T m) at `point` (sphere-centred).
    pub fn potential(&self, point: Vec3) -> f64 {
        INDEX
            .iter()
            .zip(&self.coefficients)
            .map(|(&(n, m), a)| (a * irregular_solid_harmonic(n, m, point)).re)
            .sum()
    }

    /// Screening-current field `-∇Φ` (T). Valid for any point except the
    /// centre; physically meaningful outside the sphere.
    pub fn response_field(&self, point: Vec3) -> Vec3 {
        let mut grad = Vec3::zeros();
        for (&(n, m), a) in INDEX.iter().zip(&self.coefficients) {
            if a.norm() == 0.0 {
                continue;
            }
            let g = irregular_solid_harmonic_gradient(n, m, point);
            for i in 0..3 {
                grad[i] += (a * g[i]).re;
            }
        }
        -grad
    }

    /// Vector potential of the response field in Coulomb gauge,
    /// `A = -Σ_n (r × ∇Φ_n) / n`.
    pub fn response_vector_potential(&self, point: Vec3) -> Vec3 {
        let mut out = Vec3::zeros();
        for degree in 1..=2u32 {
            let mut grad = Vec3::zeros();
            for (&(n, m), a) in INDEX.iter().zip(&self.coefficients) {
                if n != degree || a.norm() == 0.0 {
                    continue;
                }
                let g = irregular_solid_harmonic_gradient(n, m, point);
                for i in 0..3 {
                    grad[i] += (a * g[i]).re;
                }
            }
            out -= point.cross(&grad) / degree as f64;
        }
        out
    }

    /// Applied field `B_0` at `point` (sphere-centred).
    pub fn applied_field(&self, point: Vec3) -> Vec3 {
        self.source.field_at(self.offset, point)
    }

    /// Total exterior field `B_0 - ∇Φ`.
    pub fn total_field(&self, point: Vec3) -> Result<Vec3> {
        let r = point.norm();
        // allow points placed on the surface up to rounding
        if r < self.radius * (1.0 - 1e-12) {
            return Err(Error::InteriorPoint {
                radius: r,
                sphere_radius: self.radius,
            });
        }
        Ok(self.applied_field(point) + self.response_field(point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> SphereParams {
        SphereParams::new(50e-6, 10.9e3).unwrap()
    }

    #[test]
    fn centred_sphere_has_no_dipole() {
        let qf = QuadrupoleField::new(57.0, 90.0);
        let s = sphere();
        let sol = solve_coefficients(&qf, Vec3::zeros(), &s);
        for m in -1..=1 {
            assert_eq!(sol.coefficient(1, m).norm(), 0.0);
        }
        let expect = 147.0 * (4.0 * PI / 45.0).sqrt() * s.radius().powi(5);
        assert!((sol.coefficient(2, 0).re - expect).abs() < 1e-15 * expect);
        assert_eq!(sol.coefficient(3, 0).norm(), 0.0);
        assert_eq!(sol.coefficient(2, 1).norm(), 0.0);
    }

    #[test]
    fn axially_symmetric_field_has_no_m2_terms() {
        let qf = QuadrupoleField::new(70.0, 70.0);
        let sol = solve_coefficients(&qf, Vec3::new(1e-6, 2e-6, 3e-6), &sphere());
        assert_eq!(sol.coefficient(2, 2).norm(), 0.0);
        assert_eq!(sol.coefficient(2, -2).norm(), 0.0);
    }

    #[test]
    fn coefficients_describe_a_real_potential() {
        let qf = QuadrupoleField::new(57.0, 90.0);
        let sol = solve_coefficients(&qf, Vec3::new(4e-6, -7e-6, 2e-6), &sphere());
        assert!(sol.is_real_consistent(1e-30));
    }

    #[test]
    fn interior_points_rejected() {
        let qf = QuadrupoleField::new(57.0, 90.0);
        let sol = solve_coefficients(&qf, Vec3::zeros(), &sphere());
        assert!(matches!(
            sol.total_field(Vec3::new(0.0, 0.0, 10e-6)),
            Err(Error::InteriorPoint { .. })
        ));
    }

    #[test]
    fn vector_potential_curl_is_response_field() {
        let qf = QuadrupoleField::new(57.0, 90.0);
        let sol = solve_coefficients(&qf, Vec3::new(3e-6, -1e-6, 5e-6), &sphere());
        let p = Vec3::new(40e-6, 30e-6, 70e-6);
        let h = 1e-9;
        let d = |i: usize, j: usize| {
            let mut e = Vec3::zeros();
            e[j] = h;
            (sol.response_vector_potential(p + e)[i] - sol.response_vector_potential(p - e)[i]) / (2.0 * h)
        };
        let curl = Vec3::new(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
        let b = sol.response_field(p);
        assert!((curl - b).norm() < 1e-6 * b.norm());
    }
}
