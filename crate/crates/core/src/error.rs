use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("evaluation point is {distance:e} m from a coil filament (minimum 1e-9 m)")]
    PointOnFilament { distance: f64 },

    #[error("gradient extraction needs an anti-Helmholtz pair (currents {upper} A and {lower} A)")]
    NotAntiHelmholtz { upper: f64, lower: f64 },

    #[error("gradient triple ({0}, {1}, {2}) T/m is not trace free")]
    TraceNotZero(f64, f64, f64),

    #[error("point at radius {radius:e} m lies inside the sphere of radius {sphere_radius:e} m")]
    InteriorPoint { radius: f64, sphere_radius: f64 },

    #[error("frequency must be positive to compute the gravity sag")]
    ZeroFrequency,

    #[error("pickup loop comes within {distance:e} m of the sphere centre (radius {sphere_radius:e} m)")]
    LoopIntersectsSphere { distance: f64, sphere_radius: f64 },

    #[error("loop at R_P^2 + Z_P^2 = {rho_sq:e} m^2 lies inside the sphere (R^2 = {r_sq:e} m^2)")]
    LoopInsideSphere { rho_sq: f64, r_sq: f64 },

    #[error("coupling strength is zero, measurement noise is unbounded")]
    ZeroCoupling,

    #[error("no feasible pickup geometry: {0}")]
    InfeasibleConstraint(String),

    #[error("parametric heating rate {gamma_delta:e} 1/s is not below the damping {gamma:e} 1/s")]
    UnstableHeating { gamma_delta: f64, gamma: f64 },

    #[error("stage {stage} has zero mass")]
    SingularMass { stage: usize },

    #[error("frequency {frequency} Hz sits on the normal mode at {mode} Hz")]
    OnResonance { frequency: f64, mode: f64 },

    #[error("stage {stage} wire load ratio {ratio:.3} reaches the yield load")]
    YieldExceeded { stage: usize, ratio: f64 },

    #[error("integration became unstable at t = {time} s (energy {energy:e} J, bound {bound:e} J)")]
    UnstableIntegration { time: f64, energy: f64, bound: f64 },

    #[error("envelope does not decay (fitted slope {slope:e} 1/s)")]
    NoDecay { slope: f64 },

    #[error("band [{low}, {high}] Hz holds {bins} bins, need at least {needed}")]
    BandTooNarrow { low: f64, high: f64, bins: usize, needed: usize },

    #[error("band power of `{channel}` does not rise above its noise floor")]
    BandMismatch { channel: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and >= 0, got {value}"),
        })
    }
}
