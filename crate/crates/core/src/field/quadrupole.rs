use serde::Serialize;

use crate::error::{Error, Result};
use crate::Vec3;

/// Linear trap field `(b_x x, b_y y, b_z z)` with gradients in T/m.
///
/// The trace constraint `b_x + b_y + b_z = 0` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrupoleField {
    b_x: f64,
    b_y: f64,
    b_z: f64,
}

impl QuadrupoleField {
    /// Builds the field from the two transverse gradients; `b_z = -(b_x + b_y)`.
    pub fn new(b_x: f64, b_y: f64) -> Self {
        QuadrupoleField {
            b_x,
            b_y,
            b_z: -(b_x + b_y),
        }
    }

    /// Accepts either a signed, trace-free triple or a triple of magnitudes
    /// with `|b_z| = |b_x| + |b_y|` (the way trap gradients are usually quoted).
    /// Magnitudes get the sign pattern `(+, +, -)`.
    pub fn from_components(b: [f64; 3]) -> Result<Self> {
        let [bx, by, bz] = b;
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gradients",
                reason: "components must be finite".into(),
            });
        }
        let scale = bx.abs().max(by.abs()).max(bz.abs()).max(f64::MIN_POSITIVE);
        let tol = 1e-9 * scale;
        if (bx + by + bz).abs() <= tol {
            return Ok(QuadrupoleField::new(bx, by));
        }
        let same_sign = bx * by >= 0.0;
        if same_sign && (bz.abs() - bx.abs() - by.abs()).abs() <= tol {
            return Ok(QuadrupoleField::new(bx.abs(), by.abs()));
        }
        Err(Error::TraceNotZero(bx, by, bz))
    }

    pub fn b_x(&self) -> f64 {
        self.b_x
    }

    pub fn b_y(&self) -> f64 {
        self.b_y
    }

    pub fn b_z(&self) -> f64 {
        self.b_z
    }

    pub fn gradients(&self) -> [f64; 3] {
        [self.b_x, self.b_y, self.b_z]
    }

    /// True when `|b_x| <= |b_y| <= |b_z|`. Reported, never enforced.
    pub fn is_conventionally_ordered(&self) -> bool {
        self.b_x.abs() <= self.b_y.abs() && self.b_y.abs() <= self.b_z.abs()
    }

    /// All gradients multiplied by `factor` (e.g. a change of trap current).
    pub fn scaled(&self, factor: f64) -> Self {
        QuadrupoleField::new(self.b_x * factor, self.b_y * factor)
    }

    /// Applied field at `point` for a quadrupole whose zero sits at `-trap_offset`,
    /// i.e. `(b_x (x + x0), b_y (y + y0), b_z (z + z0))`.
    pub fn field_at(&self, trap_offset: Vec3, point: Vec3) -> Vec3 {
        let p = point + trap_offset;
        Vec3::new(self.b_x * p.x, self.b_y * p.y, self.b_z * p.z)
    }
}
