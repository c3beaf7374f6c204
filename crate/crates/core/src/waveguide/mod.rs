//! Exact vectorial guided modes of a step-index fiber.
//!
//! A mode is described by its longitudinal amplitudes `E_z`, `H_z`: `J_l(hr)`
//! inside the core and `K_l(qr)` in the cladding. All transverse components
//! follow from the longitudinal ones (see [`field`]). The phase convention
//! makes `e_r` real and positive just outside the surface at φ = 0, so for
//! HE, EH and TM modes `e_z` is purely imaginary there.

mod dispersion;
mod field;

#[allow(unused_imports)]
use num_traits::Float;
use core::fmt;
use core::str::FromStr;


use crate::consts::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

pub use dispersion::{
    characteristic_residual, group_slowness, guided_modes, solve_dispersion, Slowness,
};
pub use field::{
    boundary_fields, mode_profile, quasilinear_drive_field, Circulation, Direction,
    Normalization, VectorField,
};
pub(crate) use field::transverse_from_longitudinal;

use num_complex::Complex64;

/// Geometry and indices of a step-index fiber in a homogeneous cladding.
///
/// `n1 == n2` is accepted and describes the bare cladding medium (no fiber);
/// such a fiber guides nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    /// Core radius in meters.
    pub radius: f64,
    /// Core index.
    pub n1: f64,
    /// Cladding index.
    pub n2: f64,
}

impl FiberSpec {
    pub fn new(radius: f64, n1: f64, n2: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain("fiber radius must be positive"));
        }
        if !(n2 >= 1.0 && n2.is_finite()) {
            return Err(Error::Domain("cladding index must be >= 1"));
        }
        if !(n1 >= n2 && n1.is_finite()) {
            return Err(Error::Domain("core index must not be below the cladding index"));
        }
        Ok(Self { radius, n1, n2 })
    }

    /// `√(n1² − n2²)`
    pub fn numerical_aperture(&self) -> f64 {
        ((self.n1 - self.n2) * (self.n1 + self.n2)).sqrt()
    }

    pub fn index_at(&self, r: f64) -> f64 {
        if r < self.radius {
            self.n1
        } else {
            self.n2
        }
    }
}

/// `V = (2π/λ) a √(n1² − n2²)`.
pub fn v_number(fiber: &FiberSpec, lambda: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    2.0 * core::f64::consts::PI / lambda * fiber.radius * fiber.numerical_aperture()
}

/// Vacuum wavelength to angular frequency.
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * core::f64::consts::PI * SPEED_OF_LIGHT / lambda
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeFamily {
    HE,
    EH,
    TE,
    TM,
}

impl ModeFamily {
    fn name(self) -> &'static str {
        match self {
            ModeFamily::HE => "HE",
            ModeFamily::EH => "EH",
            ModeFamily::TE => "TE",
            ModeFamily::TM => "TM",
        }
    }
}

/// Mode label `(family, l, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeKind {
    pub family: ModeFamily,
    /// Azimuthal order.
    pub l: u32,
    /// Radial order, 1-based.
    pub m: u32,
}

impl ModeKind {
    pub const HE11: ModeKind = ModeKind::unchecked(ModeFamily::HE, 1, 1);
    pub const TE01: ModeKind = ModeKind::unchecked(ModeFamily::TE, 0, 1);
    pub const TM01: ModeKind = ModeKind::unchecked(ModeFamily::TM, 0, 1);
    pub const HE21: ModeKind = ModeKind::unchecked(ModeFamily::HE, 2, 1);
    pub const EH11: ModeKind = ModeKind::unchecked(ModeFamily::EH, 1, 1);

    const fn unchecked(family: ModeFamily, l: u32, m: u32) -> Self {
        Self { family, l, m }
    }

    pub fn new(family: ModeFamily, l: u32, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("radial mode order m starts at 1"));
        }
        match family {
            ModeFamily::HE | ModeFamily::EH if l == 0 => {
                Err(Error::Domain("HE/EH modes need azimuthal order l >= 1"))
            }
            ModeFamily::TE | ModeFamily::TM if l != 0 => {
                Err(Error::Domain("TE/TM modes have azimuthal order l = 0"))
            }
            _ => Ok(Self { family, l, m }),
        }
    }

    pub fn is_hybrid(&self) -> bool {
        matches!(self.family, ModeFamily::HE | ModeFamily::EH)
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.l < 10 && self.m < 10 {
            write!(f, "{}{}{}", self.family.name(), self.l, self.m)
        } else {
            write!(f, "{}_{}_{}", self.family.name(), self.l, self.m)
        }
    }
}

impl FromStr for ModeKind {
    type Err = Error;

    /// Accepts `HE11`, `te01` or the long form `EH_12_3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() < 4 || !s.is_char_boundary(2) {
            return Err(Error::Domain("mode label must look like HE11 or HE_12_1"));
        }
        let (head, rest) = s.split_at(2);
        let family = match head.to_ascii_uppercase().as_bytes() {
            b"HE" => ModeFamily::HE,
            b"EH" => ModeFamily::EH,
            b"TE" => ModeFamily::TE,
            b"TM" => ModeFamily::TM,
            _ => return Err(Error::Domain("mode family must be HE, EH, TE or TM")),
        };
        let bad = || Error::Domain("mode label must look like HE11 or HE_12_1");
        let (l, m) = if let Some(long) = rest.strip_prefix('_') {
            let mut parts = long.split('_');
            let l = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
            let m = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            (l, m)
        } else {
            let digits = rest.as_bytes();
            if digits.len() != 2 || !digits.iter().all(u8::is_ascii_digit) {
                return Err(bad());
            }
            ((digits[0] - b'0') as u32, (digits[1] - b'0') as u32)
        };
        ModeKind::new(family, l, m)
    }
}

/// Amplitudes fixing a guided mode's field up to normalization.
///
/// Inside the core `E_z = ez J_l(hr)`, `H_z = hz J_l(hr)`; outside, both are
/// multiplied by `exterior_ratio · e^{-(qr - qa)} K̃_l(qr)`, where `K̃` is the
/// exponentially scaled Macdonald function and
/// `exterior_ratio = J_l(ha) / K̃_l(qa)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub ez: Complex64,
    pub hz: Complex64,
    pub exterior_ratio: f64,
}

/// A solved guided mode at one frequency. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidedMode {
    pub fiber: FiberSpec,
    pub kind: ModeKind,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Propagation constant (rad/m).
    pub beta: f64,
    /// Core transverse wavenumber `√(n1²k² − β²)`.
    pub h: f64,
    /// Cladding decay parameter `√(β² − n2²k²)`.
    pub q: f64,
    /// Group slowness `dβ/dω` (s/m).
    pub beta_prime: f64,
    /// Set when `beta_prime` had to fall back to a one-sided difference.
    pub slowness_degraded: bool,
    pub coeffs: ModeCoefficients,
    /// Scale making `∫ n² |e|² dA = 1`.
    pub norm_quantum: f64,
    /// Scale making the axial Poynting flux 1 W.
    pub norm_power: f64,
}

impl GuidedMode {
    pub fn wavenumber(&self) -> f64 {
        self.omega / SPEED_OF_LIGHT
    }

    /// `ha`
    pub fn u(&self) -> f64 {
        self.h * self.fiber.radius
    }

    /// `qa`
    pub fn w(&self) -> f64 {
        self.q * self.fiber.radius
    }

    /// Effective index `β/k`.
    pub fn effective_index(&self) -> f64 {
        self.beta / self.wavenumber()
    }

    pub fn residual(&self) -> f64 {
        characteristic_residual(&self.fiber, self.kind, self.omega, self.beta)
    }
}

/// Smallest core radius at which `kind` is guided at vacuum wavelength
/// `lambda`, found by bisection on the solver's guided/not-guided boundary.
pub fn cutoff_radius(kind: ModeKind, lambda: f64, n1: f64, n2: f64) -> Result<f64> {
    if kind == ModeKind::HE11 {
        return Err(Error::Domain("HE11 has no cutoff"));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain("wavelength must be positive"));
    }
    if n1 <= n2 {
        return Err(Error::Domain("no cutoff without index contrast"));
    }
    let omega = angular_frequency(lambda);
    let guided = |a: f64| -> Result<bool> {
        let fiber = FiberSpec::new(a, n1, n2)?;
        Ok(dispersion::find_root(&fiber, kind, omega)?.is_some())
    };
    let mut hi = lambda;
    let mut tries = 0;
    while !guided(hi)? {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoConvergence {
                what: "cutoff bracket",
                lower: lambda,
                upper: hi,
                residual: f64::NAN,
            });
        }
    }
    let mut lo = 0.5 * hi;
    while guided(lo)? {
        hi = lo;
        lo *= 0.5;
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if guided(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
