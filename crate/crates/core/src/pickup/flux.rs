use serde::{Deserialize, Serialize};

use super::geometry::{segment_distance, LoopGeometry, LoopShape};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_adaptive, periodic_trapezoid};
use crate::sphere::MultipoleSolution;
use crate::Vec3;

const REL_TOL: f64 = 1e-13;
const MAX_PHI_NODES: usize = 1 << 14;
const PIECE_NODES: usize = 16;
const TRIANGLE_NODES: usize = 10;
const MAX_SPLIT_DEPTH: u32 = 8;

/// Quadrature route for the response flux. Both are exact for a
/// divergence-free field; they serve as cross-checks of each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FluxMethod {
    /// `∫ B · dS` over a flat spanning surface. Falls back to the line
    /// integral when that surface would pass within one radius of the sphere.
    #[default]
    Surface,
    /// `∮ A · dl` with the Coulomb-gauge vector potential.
    LineIntegral,
}

/// A loop expressed in sphere-centred coordinates.
enum Placed {
    Circle { center: Vec3, radius: f64 },
    Polygon { vertices: Vec<Vec3> },
}

fn place(lp: &LoopGeometry, shift: Vec3) -> Placed {
    match &lp.shape {
        LoopShape::CoaxialCircle { radius, height } => Placed::Circle {
            center: Vec3::new(0.0, 0.0, *height) - shift,
            radius: *radius,
        },
        LoopShape::Polyline { vertices } => Placed::Polygon {
            vertices: vertices.iter().map(|v| Vec3::from(*v) - shift).collect(),
        },
    }
}

/// Flux (Wb) of the screening field `-∇Φ` through `lp`, where `lp` is given
/// in trap coordinates and the sphere sits at `sol.offset()` from the trap
/// centre. Sign follows the loop's sense.
pub fn response_flux(sol: &MultipoleSolution, lp: &LoopGeometry, method: FluxMethod) -> Result<f64> {
    lp.validate()?;
    let placed = place(lp, sol.offset());
    let radius = sol.radius();
    let wire_distance = match &placed {
        Placed::Circle { center, radius: rp } => circle_distance(*center, *rp),
        Placed::Polygon { vertices } => polygon_distance(vertices),
    };
    if wire_distance <= radius {
        return Err(Error::LoopIntersectsSphere {
            distance: wire_distance,
            sphere_radius: radius,
        });
    }
    let flux = match (method, &placed) {
        (FluxMethod::LineIntegral, _) => line_flux(sol, &placed),
        (FluxMethod::Surface, Placed::Circle { center, radius: rp }) => {
            if disk_distance(*center, *rp) <= radius {
                line_flux(sol, &placed)
            } else {
                disk_flux(sol, *center, *rp)
            }
        }
        (FluxMethod::Surface, Placed::Polygon { vertices }) => {
            polygon_surface_flux(sol, vertices, radius).unwrap_or_else(|| line_flux(sol, &placed))
        }
    };
    Ok(lp.sense.sign() * flux)
}

fn circle_distance(center: Vec3, radius: f64) -> f64 {
    let rho = (center.x * center.x + center.y * center.y).sqrt();
    ((rho - radius).powi(2) + center.z * center.z).sqrt()
}

fn disk_distance(center: Vec3, radius: f64) -> f64 {
    let rho = (center.x * center.x + center.y * center.y).sqrt();
    let outside = (rho - radius).max(0.0);
    (outside * outside + center.z * center.z).sqrt()
}

fn polygon_distance(vertices: &[Vec3]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| segment_distance(vertices[i], vertices[(i + 1) % n], Vec3::zeros()))
        .fold(f64::INFINITY, f64::min)
}

fn line_flux(sol: &MultipoleSolution, placed: &Placed) -> f64 {
    match placed {
        Placed::Circle { center, radius } => periodic_trapezoid(
            |phi| {
                let (s, c) = phi.sin_cos();
                let p = center + Vec3::new(radius * c, radius * s, 0.0);
                let dl = Vec3::new(-radius * s, radius * c, 0.0);
                sol.response_vector_potential(p).dot(&dl)
            },
            32,
            REL_TOL,
            MAX_PHI_NODES,
        ),
        Placed::Polygon { vertices } => {
            let (x, w) = gauss_legendre(PIECE_NODES);
            let n = vertices.len();
            let mut total = 0.0;
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let len = (b - a).norm();
                let near = segment_distance(a, b, Vec3::zeros());
                let pieces = ((4.0 * len / near).ceil() as usize).clamp(1, 4096);
                let step = (b - a) / pieces as f64;
                for k in 0..pieces {
                    let start = a + step * k as f64;
                    for (xi, wi) in x.iter().zip(&w) {
                        let p = start + step * (0.5 * (xi + 1.0));
                        total += 0.5 * wi * sol.response_vector_potential(p).dot(&step);
                    }
                }
            }
            total
        }
    }
}

fn disk_flux(sol: &MultipoleSolution, center: Vec3, radius: f64) -> f64 {
    let ring = |rho: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        rho * periodic_trapezoid(
            |phi| {
                let (s, c) = phi.sin_cos();
                sol.response_field(center + Vec3::new(rho * c, rho * s, 0.0)).z
            },
            16,
            REL_TOL,
            MAX_PHI_NODES,
        )
    };
    integrate_adaptive(ring, 0.0, radius, REL_TOL, 0.0)
}

/// Fan triangulation about the vertex centroid. Returns `None` when a
/// triangle cannot be certified to stay clear of the sphere.
fn polygon_surface_flux(sol: &MultipoleSolution, vertices: &[Vec3], radius: f64) -> Option<f64> {
    let centroid = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
    let (x, w) = gauss_legendre(TRIANGLE_NODES);
    let nodes: Vec<(f64, f64)> = x.iter().zip(&w).map(|(xi, wi)| (0.5 * (xi + 1.0), 0.5 * wi)).collect();
    let n = vertices.len();
    let mut total = 0.0;
    for i in 0..n {
        let tri = [centroid, vertices[i], vertices[(i + 1) % n]];
        if triangle_distance(&tri) <= radius {
            return None;
        }
        total += triangle_flux(sol, tri, &nodes, 0);
    }
    Some(total)
}

fn triangle_distance(tri: &[Vec3; 3]) -> f64 {
    let [a, b, c] = *tri;
    let normal = (b - a).cross(&(c - a));
    let nn = normal.norm_squared();
    if nn > 0.0 {
        // foot of the perpendicular from the origin
        let p = normal * (a.dot(&normal) / nn);
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|(u, v)| (v - u).cross(&(p - u)).dot(&normal) >= 0.0);
        if inside {
            return p.norm();
        }
    }
    [(a, b), (b, c), (c, a)]
        .iter()
        .map(|(u, v)| segment_distance(*u, *v, Vec3::zeros()))
        .fold(f64::INFINITY, f64::min)
}

fn triangle_flux(sol: &MultipoleSolution, tri: [Vec3; 3], nodes: &[(f64, f64)], depth: u32) -> f64 {
    let [a, b, c] = tri;
    let diameter = (b - a).norm().max((c - b).norm()).max((a - c).norm());
    if depth < MAX_SPLIT_DEPTH && diameter > 0.5 * triangle_distance(&tri) {
        let (ab, bc, ca) = ((a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0);
        return [[a, ab, ca], [ab, b, bc], [ca, bc, c], [bc, ca, ab]]
            .into_iter()
            .map(|t| triangle_flux(sol, t, nodes, depth + 1))
            .sum();
    }
    // p(u, v) = a + u (b - a) + u v (c - b), dS = u (b - a) × (c - a) du dv
    let area = (b - a).cross(&(c - a));
    let mut total = 0.0;
    for &(u, wu) in nodes {
        for &(v, wv) in nodes {
            let p = a + (b - a) * u + (c - b) * (u * v);
            total += wu * wv * u * sol.response_field(p).dot(&area);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QuadrupoleField;
    use crate::pickup::Sense;
    use crate::sphere::{solve_coefficients, SphereParams};

    fn setup(offset: Vec3) -> MultipoleSolution {
        let qf = QuadrupoleField::new(57.0, 90.0);
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        solve_coefficients(&qf, offset, &s)
    }

    #[test]
    fn surface_and_line_routes_agree_for_circle() {
        let sol = setup(Vec3::new(2e-6, -3e-6, 1e-6));
        let lp = LoopGeometry::coaxial_circle(70e-6, 80e-6).unwrap();
        let s = response_flux(&sol, &lp, FluxMethod::Surface).unwrap();
        let l = response_flux(&sol, &lp, FluxMethod::LineIntegral).unwrap();
        assert!((s - l).abs() < 1e-10 * s.abs(), "{s} {l}");
    }

    #[test]
    fn surface_and_line_routes_agree_for_square() {
        let sol = setup(Vec3::new(4e-6, 1e-6, -2e-6));
        let lp = LoopGeometry::square(30e-6, -10e-6, 90e-6, 120e-6).unwrap();
        let s = response_flux(&sol, &lp, FluxMethod::Surface).unwrap();
        let l = response_flux(&sol, &lp, FluxMethod::LineIntegral).unwrap();
        assert!((s - l).abs() < 1e-8 * s.abs(), "{s} {l}");
    }

    #[test]
    fn square_approximates_circle_of_equal_area() {
        let sol = setup(Vec3::zeros());
        // a many-sided polygon converges to the circle
        let n = 256;
        let r = 60e-6;
        let verts = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Vec3::new(r * t.cos(), r * t.sin(), 75e-6)
            })
            .collect();
        let poly = LoopGeometry::polyline(verts).unwrap();
        let circ = LoopGeometry::coaxial_circle(r, 75e-6).unwrap();
        let a = response_flux(&sol, &poly, FluxMethod::Surface).unwrap();
        let b = response_flux(&sol, &circ, FluxMethod::Surface).unwrap();
        assert!((a - b).abs() < 1e-3 * b.abs(), "{a} {b}");
    }

    #[test]
    fn sense_flips_sign_and_intersection_rejected() {
        let sol = setup(Vec3::zeros());
        let lp = LoopGeometry::coaxial_circle(40e-6, 60e-6).unwrap();
        let f = response_flux(&sol, &lp, FluxMethod::Surface).unwrap();
        let g = response_flux(&sol, &lp.clone().with_sense(Sense::Negative), FluxMethod::Surface).unwrap();
        assert_eq!(f, -g);
        let bad = LoopGeometry::coaxial_circle(30e-6, 30e-6).unwrap();
        assert!(matches!(
            response_flux(&sol, &bad, FluxMethod::Surface),
            Err(Error::LoopIntersectsSphere { .. })
        ));
    }

    #[test]
    fn spanning_disk_through_sphere_uses_line_route() {
        let sol = setup(Vec3::zeros());
        let lp = LoopGeometry::coaxial_circle(100e-6, 10e-6).unwrap();
        let s = response_flux(&sol, &lp, FluxMethod::Surface).unwrap();
        let l = response_flux(&sol, &lp, FluxMethod::LineIntegral).unwrap();
        assert_eq!(s, l);
    }
}
