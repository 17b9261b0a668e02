//! Magnetic readout of the sphere's motion: pickup-loop flux couplings, SQUID
//! transduction, spiral inductance, position noise and geometry optimisation.

mod coupling;
mod flux;
mod geometry;
mod optimize;
mod squid;
mod wheeler;

pub use coupling::{
    assembly_coupling, coil_coupling, coupling_nu_analytic, coupling_nu_numeric, coupling_nu_numeric_with, Axis,
    NumericCoupling,
};
pub use flux::{response_flux, FluxMethod};
pub use geometry::{LoopGeometry, LoopShape, PickupCoil, Sense, SpacingConvention};
pub use optimize::{optimize_pickup, GridMetadata, OptimizerSettings, PickupOptimum, SpiralPoint, SpiralProblem};
pub use squid::{
    displacement_noise_from_eta, measurement_noise, measurement_noise_for_coil, squid_coupling, squid_coupling_ratio,
    SquidCircuit, SquidParams,
};
pub use wheeler::{wheeler_inductance, WheelerCoefficients};
