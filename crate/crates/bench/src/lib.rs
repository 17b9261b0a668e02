//! Shared fixtures of the benchmark targets.

use maglev_core::field::QuadrupoleField;
use maglev_core::noise::OscillatorMode;
use maglev_core::pickup::{SquidCircuit, SquidParams};
use maglev_core::sphere::SphereParams;

pub fn sphere() -> SphereParams {
    SphereParams::new(50e-6, 10.9e3).expect("valid sphere")
}

pub fn trap() -> QuadrupoleField {
    QuadrupoleField::new(57.0, 90.0)
}

pub fn circuit() -> SquidCircuit {
    SquidCircuit::new(SquidParams {
        l_s: 15e-12,
        l_i: 0.53e-6,
        l_w: 100e-9,
        l_p: 1e-9,
        k: None,
        mutual: Some(2.3e-9),
        s_phiphi: 1.1578402647401887e-44,
        s_jj: None,
    })
    .expect("valid circuit")
}

/// Ringdown-scale mode that keeps one simulated second cheap.
pub fn mode() -> OscillatorMode {
    OscillatorMode::from_quality(1e-9, 10.0, 100.0, 1e-3).expect("valid mode")
}
