//! Design and analysis toolkit for superconducting microspheres levitated in
//! magnetostatic quadrupole traps.
//!
//! The crate covers the applied trap field ([`field`]), the exact Meissner
//! response of the sphere ([`sphere`]), magnetic readout through pickup loops
//! and a SQUID ([`pickup`]), frequency-domain noise budgets ([`noise`]),
//! pendulum vibration isolation ([`isolation`]) and stochastic time-domain
//! simulation with analysis tools ([`dynamics`]). All quantities are SI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod isolation;
pub mod noise;
pub mod pickup;
pub mod quadrature;
pub mod sphere;

pub use error::{Error, Result};

/// Cartesian 3-vector in metres, tesla or newtons depending on context.
pub type Vec3 = nalgebra::Vector3<f64>;
