//! Vector guided and radiation modes of a step-index nanofiber, the
//! spontaneous-emission rates of a nearby two-level atom, and the axial
//! force exerted on it by near-resonant guided light.
//!
//! Lengths are in metres, rates and frequencies in rad/s, forces in newtons.
//! Fields vary as `exp(i(fβz + plφ − ωt))`.
#![no_std]
extern crate alloc;

pub mod consts;
pub mod coupling;
pub mod error;
pub mod force;
pub mod quadrature;
pub mod radiation;
pub mod specfun;
pub mod waveguide;

pub use coupling::{AtomConfig, Dipole, DriveConfig, EmissionRates};
pub use error::{Error, Result};
pub use force::{asymmetry, axial_force, eta_infinity, steady_state, ForceResult, SteadyState};
pub use waveguide::{Direction, FiberSpec, GuidedMode, ModeKind};
