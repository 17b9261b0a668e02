use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::Vec3;

/// Winding sense of a loop. Positive means counter-clockwise seen from +z for
/// circles, and the vertex order for polylines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Positive,
    Negative,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Positive => 1.0,
            Sense::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopShape {
    /// Circle of radius `radius` in the plane `z = height`, centred on the z axis.
    CoaxialCircle { radius: f64, height: f64 },
    /// Closed polygon; the last vertex connects back to the first.
    Polyline { vertices: Vec<[f64; 3]> },
}

/// A single pickup loop in trap coordinates (trap centre at the origin).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopGeometry {
    pub shape: LoopShape,
    #[serde(default)]
    pub sense: Sense,
}

impl LoopGeometry {
    pub fn coaxial_circle(radius: f64, height: f64) -> Result<Self> {
        let g = LoopGeometry {
            shape: LoopShape::CoaxialCircle { radius, height },
            sense: Sense::Positive,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn polyline(vertices: Vec<Vec3>) -> Result<Self> {
        let g = LoopGeometry {
            shape: LoopShape::Polyline {
                vertices: vertices.into_iter().map(Into::into).collect(),
            },
            sense: Sense::Positive,
        };
        g.validate()?;
        Ok(g)
    }

    /// Axis-aligned square in the plane `z = height` with side `side`,
    /// centred at `(cx, cy)`, traversed counter-clockwise seen from +z.
    pub fn square(cx: f64, cy: f64, height: f64, side: f64) -> Result<Self> {
        let h = 0.5 * side;
        Self::polyline(vec![
            Vec3::new(cx - h, cy - h, height),
            Vec3::new(cx + h, cy - h, height),
            Vec3::new(cx + h, cy + h, height),
            Vec3::new(cx - h, cy + h, height),
        ])
    }

    pub fn with_sense(mut self, sense: Sense) -> Self {
        self.sense = sense;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.shape {
            LoopShape::CoaxialCircle { radius, height } => {
                ensure_positive("loop.radius", *radius)?;
                if !height.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "loop.height",
                        reason: "must be finite".into(),
                    });
                }
            }
            LoopShape::Polyline { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidParameter {
                        name: "loop.vertices",
                        reason: format!("a closed loop needs at least 3 vertices, got {}", vertices.len()),
                    });
                }
                if vertices.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "loop.vertices",
                        reason: "vertices must be finite".into(),
                    });
                }
                let n = vertices.len();
                for i in 0..n {
                    let a = Vec3::from(vertices[i]);
                    let b = Vec3::from(vertices[(i + 1) % n]);
                    if (b - a).norm() == 0.0 {
                        return Err(Error::InvalidParameter {
                            name: "loop.vertices",
                            reason: format!("vertices {i} and {} coincide", (i + 1) % n),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest distance from the loop to a point.
    pub fn distance_to(&self, point: Vec3) -> f64 {
        match &self.shape {
            LoopShape::CoaxialCircle { radius, height } => {
                let rho = (point.x * point.x + point.y * point.y).sqrt();
                ((rho - radius).powi(2) + (point.z - height).powi(2)).sqrt()
            }
            LoopShape::Polyline { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        segment_distance(Vec3::from(vertices[i]), Vec3::from(vertices[(i + 1) % n]), point)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

pub(crate) fn segment_distance(a: Vec3, b: Vec3, p: Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

/// How the inter-wire distance of a spiral is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpacingConvention {
    /// The distance is the gap between wire edges; pitch = width + gap.
    #[default]
    Gap,
    /// The distance is the centre-to-centre pitch.
    CenterToCenter,
}

/// Multi-turn pickup coil. Planar spirals are approximated as concentric
/// circular turns with radii `inner_radius + width/2 + i * pitch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickupCoil {
    pub turns: Vec<LoopGeometry>,
    pub wire_width: f64,
    pub gap: f64,
    pub inner_radius: f64,
}

impl PickupCoil {
    pub fn planar_spiral(
        inner_radius: f64,
        height: f64,
        n_turns: usize,
        wire_width: f64,
        spacing: f64,
        convention: SpacingConvention,
    ) -> Result<Self> {
        ensure_non_negative("inner_radius", inner_radius)?;
        ensure_positive("wire_width", wire_width)?;
        ensure_positive("spacing", spacing)?;
        if n_turns < 1 {
            return Err(Error::InvalidParameter {
                name: "n_turns",
                reason: "at least one turn is required".into(),
            });
        }
        let gap = match convention {
            SpacingConvention::Gap => spacing,
            SpacingConvention::CenterToCenter => spacing - wire_width,
        };
        if gap < 0.0 {
            return Err(Error::InvalidParameter {
                name: "spacing",
                reason: format!("pitch {spacing} is smaller than the wire width {wire_width}"),
            });
        }
        let pitch = wire_width + gap;
        let turns = (0..n_turns)
            .map(|i| LoopGeometry::coaxial_circle(inner_radius + 0.5 * wire_width + i as f64 * pitch, height))
            .collect::<Result<Vec<_>>>()?;
        Ok(PickupCoil {
            turns,
            wire_width,
            gap,
            inner_radius,
        })
    }

    /// Arbitrary assembly of loops (e.g. a gradiometer). Width, gap and inner
    /// radius only matter for the inductance estimate.
    pub fn from_loops(turns: Vec<LoopGeometry>, wire_width: f64, gap: f64, inner_radius: f64) -> Result<Self> {
        if turns.is_empty() {
            return Err(Error::InvalidParameter {
                name: "turns",
                reason: "at least one loop is required".into(),
            });
        }
        for t in &turns {
            t.validate()?;
        }
        Ok(PickupCoil {
            turns,
            wire_width,
            gap,
            inner_radius,
        })
    }

    pub fn n_turns(&self) -> usize {
        self.turns.len()
    }

    pub fn pitch(&self) -> f64 {
        self.wire_width + self.gap
    }

    /// Inner and outer diameters of the winding (m).
    pub fn diameters(&self) -> (f64, f64) {
        let n = self.n_turns() as f64;
        let d_in = 2.0 * self.inner_radius;
        let d_out = 2.0 * (self.inner_radius + n * self.wire_width + (n - 1.0) * self.gap);
        (d_in, d_out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_radii_step_by_pitch() {
        let c = PickupCoil::planar_spiral(5e-6, 50e-6, 4, 0.3e-6, 0.45e-6, SpacingConvention::Gap).unwrap();
        let radii: Vec<f64> = c
            .turns
            .iter()
            .map(|t| match t.shape {
                LoopShape::CoaxialCircle { radius, .. } => radius,
                _ => unreachable!(),
            })
            .collect();
        for w in radii.windows(2) {
            assert!((w[1] - w[0] - 0.75e-6).abs() < 1e-18);
        }
        assert!((c.pitch() - 0.75e-6).abs() < 1e-18);
        let c2 = PickupCoil::planar_spiral(5e-6, 50e-6, 4, 0.3e-6, 0.45e-6, SpacingConvention::CenterToCenter).unwrap();
        assert!((c2.pitch() - 0.45e-6).abs() < 1e-18);
    }

    #[test]
    fn degenerate_loops_rejected() {
        assert!(LoopGeometry::coaxial_circle(0.0, 1.0).is_err());
        assert!(LoopGeometry::polyline(vec![Vec3::zeros(), Vec3::x()]).is_err());
        assert!(PickupCoil::planar_spiral(1e-6, 1e-5, 0, 1e-6, 1e-6, SpacingConvention::Gap).is_err());
    }

    #[test]
    fn distance_to_circle_and_square() {
        let c = LoopGeometry::coaxial_circle(3.0, 4.0).unwrap();
        assert!((c.distance_to(Vec3::zeros()) - 5.0).abs() < 1e-15);
        let s = LoopGeometry::square(0.0, 0.0, 1.0, 2.0).unwrap();
        assert!((s.distance_to(Vec3::zeros()) - 2f64.sqrt()).abs() < 1e-15);
    }
}
