//! SI constants (CODATA 2018).

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, tied to `EPSILON_0` through `1 / (ε₀ c²)`.
pub const MU_0: f64 = 1.0 / (EPSILON_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT);
/// Vacuum impedance `μ₀ c`.
pub const Z_0: f64 = MU_0 * SPEED_OF_LIGHT;
