//! Six-component field profiles of guided modes.

#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::dispersion::{Root, Slowness};
use super::{FiberSpec, GuidedMode, ModeCoefficients, ModeFamily, ModeKind};
use crate::consts::{EPSILON_0, MU_0};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::specfun::{cyl_bessel, cyl_bessel_scaled, BesselKind, CylEval};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Propagation direction `f` along the fiber axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];
}

/// Circulation `p` of a quasicircular mode (sign of the azimuthal phase).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Circulation {
    Plus,
    Minus,
}

impl Circulation {
    pub fn sign(self) -> f64 {
        match self {
            Circulation::Plus => 1.0,
            Circulation::Minus => -1.0,
        }
    }

    pub const BOTH: [Circulation; 2] = [Circulation::Plus, Circulation::Minus];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `∫ n² |e|² dA = 1` (m⁻² field units).
    Quantum,
    /// Axial Poynting flux of 1 W (V/m).
    Power,
}

/// Complex field components at `(r, φ)` in the cylindrical basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorField {
    pub r: f64,
    pub phi: f64,
    pub e_r: Complex64,
    pub e_phi: Complex64,
    pub e_z: Complex64,
    pub h_r: Complex64,
    pub h_phi: Complex64,
    pub h_z: Complex64,
}

impl VectorField {
    pub fn zero(r: f64, phi: f64) -> Self {
        Self {
            r,
            phi,
            e_r: ZERO,
            e_phi: ZERO,
            e_z: ZERO,
            h_r: ZERO,
            h_phi: ZERO,
            h_z: ZERO,
        }
    }

    pub fn electric(&self) -> [Complex64; 3] {
        [self.e_r, self.e_phi, self.e_z]
    }

    pub fn magnetic(&self) -> [Complex64; 3] {
        [self.h_r, self.h_phi, self.h_z]
    }

    /// Electric field as `(x, y, z)` components.
    pub fn electric_cartesian(&self) -> [Complex64; 3] {
        let (s, c) = self.phi.sin_cos();
        [
            self.e_r * c - self.e_phi * s,
            self.e_r * s + self.e_phi * c,
            self.e_z,
        ]
    }

    /// Magnetic field as `(x, y, z)` components.
    pub fn magnetic_cartesian(&self) -> [Complex64; 3] {
        let (s, c) = self.phi.sin_cos();
        [
            self.h_r * c - self.h_phi * s,
            self.h_r * s + self.h_phi * c,
            self.h_z,
        ]
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            e_r: self.e_r * factor,
            e_phi: self.e_phi * factor,
            e_z: self.e_z * factor,
            h_r: self.h_r * factor,
            h_phi: self.h_phi * factor,
            h_z: self.h_z * factor,
            ..*self
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            e_r: self.e_r + other.e_r,
            e_phi: self.e_phi + other.e_phi,
            e_z: self.e_z + other.e_z,
            h_r: self.h_r + other.h_r,
            h_phi: self.h_phi + other.h_phi,
            h_z: self.h_z + other.h_z,
            ..*self
        }
    }

    /// Time-averaged axial Poynting vector `½ Re(E × H*)_z` (W/m² for
    /// physical fields).
    pub fn axial_poynting(&self) -> f64 {
        0.5 * (self.e_r * self.h_phi.conj() - self.e_phi * self.h_r.conj()).re
    }

    /// `|e_r|² + |e_φ|² + |e_z|²`
    pub fn electric_norm_sqr(&self) -> f64 {
        self.e_r.norm_sqr() + self.e_phi.norm_sqr() + self.e_z.norm_sqr()
    }

    pub fn magnetic_norm_sqr(&self) -> f64 {
        self.h_r.norm_sqr() + self.h_phi.norm_sqr() + self.h_z.norm_sqr()
    }
}

/// Transverse components from the longitudinal ones for fields varying as
/// `e^{i(βz + lφ − ωt)}` in a medium of relative permittivity `eps`.
///
/// `kappa2` is `n²k² − β²` (negative for evanescent fields). Returns
/// `(e_r, e_φ, h_r, h_φ)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn transverse_from_longitudinal(
    omega: f64,
    beta: f64,
    l: f64,
    eps: f64,
    kappa2: f64,
    r: f64,
    ez: Complex64,
    dez: Complex64,
    hz: Complex64,
    dhz: Complex64,
) -> [Complex64; 4] {
    let pre = I / kappa2;
    let il_r = I * (l / r);
    let wmu = omega * MU_0;
    let weps = omega * EPSILON_0 * eps;
    [
        pre * (dez * beta + il_r * hz * wmu),
        pre * (il_r * ez * beta - dhz * wmu),
        pre * (dhz * beta - il_r * ez * weps),
        pre * (il_r * hz * beta + dez * weps),
    ]
}

/// Unnormalized `(f, p) = (+, +)` radial profile: `[e_r, e_φ, e_z, h_r, h_φ, h_z]`.
pub(crate) fn radial_fields(mode: &GuidedMode, r: f64) -> [Complex64; 6] {
    radial_fields_on(mode, r, r < mode.fiber.radius)
}

/// As [`radial_fields`], with the region (core or cladding) chosen explicitly.
fn radial_fields_on(mode: &GuidedMode, r: f64, core: bool) -> [Complex64; 6] {
    let fiber = &mode.fiber;
    let l = mode.kind.l;
    let c = &mode.coeffs;
    let (n, kappa2, z, dz) = if core {
        let j = cyl_bessel(BesselKind::J, l, mode.h * r).unwrap_or(CylEval::ZERO);
        (fiber.n1, mode.h * mode.h, j.value, mode.h * j.derivative)
    } else {
        let x = mode.q * r;
        let kk = cyl_bessel_scaled(BesselKind::K, l, x).unwrap_or(CylEval::ZERO);
        let decay = c.exterior_ratio * (mode.w() - x).exp();
        (
            fiber.n2,
            -mode.q * mode.q,
            decay * kk.value,
            decay * mode.q * kk.derivative,
        )
    };
    let ez = c.ez * z;
    let hz = c.hz * z;
    let [er, ephi, hr, hphi] = transverse_from_longitudinal(
        mode.omega,
        mode.beta,
        l as f64,
        n * n,
        kappa2,
        r,
        ez,
        c.ez * dz,
        hz,
        c.hz * dz,
    );
    [er, ephi, ez, hr, hphi, hz]
}

/// Apply the `(f, p)` mapping, the azimuthal phase `e^{iplφ}` and `scale`.
fn oriented(
    raw: [Complex64; 6],
    l: u32,
    r: f64,
    phi: f64,
    f: Direction,
    p: Circulation,
    scale: f64,
) -> VectorField {
    let (fs, ps) = (f.sign(), p.sign());
    let phase = Complex64::from_polar(scale, ps * l as f64 * phi);
    let [er, ephi, ez, hr, hphi, hz] = raw;
    VectorField {
        r,
        phi,
        e_r: er * phase,
        e_phi: ephi * (ps * phase),
        e_z: ez * (fs * phase),
        h_r: hr * (fs * ps * phase),
        h_phi: hphi * (fs * phase),
        h_z: hz * (ps * phase),
    }
}

/// Quasicircular mode profile `(e, h)` including the azimuthal phase
/// `e^{iplφ}`, for propagation `f` and circulation `p`.
///
/// Reversing `f` flips `e_z`, `h_r` and `h_φ`; reversing `p` flips `e_φ`,
/// `h_r` and `h_z`. For `l = 0` modes `p` only changes signs of components
/// that vanish anyway, except for TE/TM where it is a global sign choice;
/// callers should use `Circulation::Plus`.
pub fn mode_profile(
    mode: &GuidedMode,
    r: f64,
    phi: f64,
    f: Direction,
    p: Circulation,
    normalization: Normalization,
) -> Result<VectorField> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain("radial position must be positive"));
    }
    let scale = match normalization {
        Normalization::Quantum => mode.norm_quantum,
        Normalization::Power => mode.norm_power,
    };
    Ok(oriented(radial_fields(mode, r), mode.kind.l, r, phi, f, p, scale))
}

/// Quantum-normalized profiles just inside and just outside `r = a`, at
/// φ = 0, `(f, p) = (+, +)`.
pub fn boundary_fields(mode: &GuidedMode) -> (VectorField, VectorField) {
    let a = mode.fiber.radius;
    let inner = radial_fields_on(mode, a, true);
    let outer = radial_fields_on(mode, a, false);
    let mk = |raw| {
        oriented(
            raw,
            mode.kind.l,
            a,
            0.0,
            Direction::Forward,
            Circulation::Plus,
            mode.norm_quantum,
        )
    };
    (mk(inner), mk(outer))
}

/// Power-normalized quasilinearly polarized drive field of `power` watts.
///
/// Hybrid modes superpose both circulations,
/// `(e^{(f,+)} e^{-iψ} + e^{(f,−)} e^{iψ})/√2` with `ψ = orientation`, so
/// that `ψ = 0` gives the x-polarized mode whose field at φ = 0 is
/// `√(2P)(e_r x̂ + f e_z ẑ)`. For HE11 `ψ` is the polarization axis angle.
/// TE and TM modes ignore `orientation`.
pub fn quasilinear_drive_field(
    mode: &GuidedMode,
    orientation: f64,
    f: Direction,
    power: f64,
    r: f64,
    phi: f64,
) -> Result<VectorField> {
    if !(power >= 0.0) {
        return Err(Error::Domain("drive power must be non-negative"));
    }
    let amp = power.sqrt();
    if mode.kind.is_hybrid() {
        let plus = mode_profile(mode, r, phi, f, Circulation::Plus, Normalization::Power)?;
        let minus = mode_profile(mode, r, phi, f, Circulation::Minus, Normalization::Power)?;
        let w = amp / core::f64::consts::SQRT_2;
        Ok(plus
            .scale(Complex64::from_polar(w, -orientation))
            .add(&minus.scale(Complex64::from_polar(w, orientation))))
    } else {
        Ok(mode_profile(mode, r, phi, f, Circulation::Plus, Normalization::Power)?
            .scale(Complex64::new(amp, 0.0)))
    }
}

/// Assemble a [`GuidedMode`] from a dispersion root: boundary coefficients,
/// phase convention and both normalizations.
pub(crate) fn build_mode(
    fiber: &FiberSpec,
    kind: ModeKind,
    omega: f64,
    beta: f64,
    root: Root,
    slowness: Slowness,
) -> Result<GuidedMode> {
    let Root { u, w } = root;
    let a = fiber.radius;
    let l = kind.l;
    let j = cyl_bessel(BesselKind::J, l, u)?;
    let kk = cyl_bessel_scaled(BesselKind::K, l, w)?;
    let (ez, hz) = match kind.family {
        ModeFamily::TE => (ZERO, Complex64::new(1.0, 0.0)),
        ModeFamily::TM => (Complex64::new(1.0, 0.0), ZERO),
        ModeFamily::HE | ModeFamily::EH => {
            // Continuity of e_φ: B/A = iβ l S / (ωμ₀ (𝒥 + 𝒦)).
            let s = 1.0 / (u * u) + 1.0 / (w * w);
            let jd = j.derivative / u;
            let kr = kk.derivative / (w * kk.value);
            let ratio = l as f64 * s * j.value / (jd + j.value * kr);
            (Complex64::new(1.0, 0.0), I * (beta * ratio / (omega * MU_0)))
        }
    };
    let mut mode = GuidedMode {
        fiber: *fiber,
        kind,
        omega,
        beta,
        h: u / a,
        q: w / a,
        beta_prime: slowness.value,
        slowness_degraded: slowness.degraded,
        coeffs: ModeCoefficients {
            ez,
            hz,
            exterior_ratio: j.value / kk.value,
        },
        norm_quantum: 1.0,
        norm_power: 1.0,
    };

    let outer = radial_fields_on(&mode, a, false);
    let reference = if kind.family == ModeFamily::TE {
        outer[1]
    } else {
        outer[0]
    };
    if reference.norm() == 0.0 || !reference.norm().is_finite() {
        return Err(Error::NoConvergence {
            what: "mode phase reference",
            lower: beta,
            upper: beta,
            residual: reference.norm(),
        });
    }
    let phase = reference.conj() / reference.norm();
    mode.coeffs.ez *= phase;
    mode.coeffs.hz *= phase;

    let (energy, flux) = cross_section_integrals(&mode);
    if !(energy > 0.0 && flux > 0.0) {
        return Err(Error::NoConvergence {
            what: "mode normalization",
            lower: energy,
            upper: flux,
            residual: f64::NAN,
        });
    }
    mode.norm_quantum = 1.0 / energy.sqrt();
    mode.norm_power = 1.0 / flux.sqrt();
    Ok(mode)
}

/// Gauss–Legendre points per panel of the radial integrals.
const PANEL_POINTS: usize = 32;
/// The exterior integral stops where the field has decayed by `e^{-45}`.
const TAIL_DECAY: f64 = 45.0;

/// Panel edges covering `[0, ∞)` for a mode: the core split into panels no
/// wider than two oscillation half-periods, the cladding into geometrically
/// growing panels capped at `2/q`.
pub(crate) fn radial_breaks(mode: &GuidedMode) -> alloc::vec::Vec<f64> {
    let a = mode.fiber.radius;
    let inner_panels = ((mode.u() / 2.0).ceil() as usize + 1).max(2);
    let mut breaks = alloc::vec::Vec::with_capacity(inner_panels + 32);
    for i in 0..=inner_panels {
        breaks.push(a * i as f64 / inner_panels as f64);
    }
    let cap = 2.0 / mode.q;
    let end = a + TAIL_DECAY / mode.q;
    let mut width = 0.25 * a;
    let mut r = a;
    while r < end {
        r = (r + width.min(cap)).min(end);
        breaks.push(r);
        width *= 2.0;
    }
    breaks
}

/// `(∫ n²|e|² dA, ∫ S_z dA)` of the unnormalized `(+, +)` profile.
fn cross_section_integrals(mode: &GuidedMode) -> (f64, f64) {
    let gl = GaussLegendre::new(PANEL_POINTS);
    let breaks = radial_breaks(mode);
    let mut energy = 0.0;
    let mut flux = 0.0;
    for win in breaks.windows(2) {
        for (r, wt) in gl.mapped(win[0], win[1]) {
            let [er, ephi, ez, hr, hphi, _] = radial_fields(mode, r);
            let n = mode.fiber.index_at(r);
            energy += wt * r * n * n * (er.norm_sqr() + ephi.norm_sqr() + ez.norm_sqr());
            flux += wt * r * 0.5 * (er * hphi.conj() - ephi * hr.conj()).re;
        }
    }
    (2.0 * PI * energy, 2.0 * PI * flux)
}
