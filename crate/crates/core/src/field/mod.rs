//! Applied trap fields: ideal quadrupoles, filament models of coil pairs and
//! the comparison between the two.

mod coil;
mod fit;
mod quadrupole;

pub use coil::{biot_savart_field, extract_gradients, extract_gradients_with_step, CoilPair, EllipticFilament, GradientExtraction, WindingOffset};
pub use fit::{halton_cube, quadrupole_fit, quadrupole_fit_rms, relative_deviation, QuadrupoleFit};
pub use quadrupole::QuadrupoleField;

use crate::Vec3;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

/// A field value at a position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub position: [f64; 3],
    pub field: [f64; 3],
}

impl FieldSample {
    pub fn new(position: Vec3, field: Vec3) -> Self {
        FieldSample {
            position: position.into(),
            field: field.into(),
        }
    }

    pub fn position(&self) -> Vec3 {
        Vec3::from(self.position)
    }

    pub fn field(&self) -> Vec3 {
        Vec3::from(self.field)
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().chain(&self.field).all(|v| v.is_finite())
    }
}

/// Samples the coil field at every point.
pub fn field_map(coils: &CoilPair, points: &[Vec3]) -> crate::Result<Vec<FieldSample>> {
    points
        .iter()
        .map(|p| biot_savart_field(coils, *p).map(|b| FieldSample::new(*p, b)))
        .collect()
}

/// Writes samples as CSV with header `x,y,z,Bx,By,Bz` (SI units).
pub fn write_field_map_csv<W: Write>(mut out: W, samples: &[FieldSample]) -> io::Result<()> {
    writeln!(out, "x,y,z,Bx,By,Bz")?;
    for s in samples {
        let [x, y, z] = s.position;
        let [bx, by, bz] = s.field;
        writeln!(out, "{x:e},{y:e},{z:e},{bx:e},{by:e},{bz:e}")?;
    }
    Ok(())
}
