//! Atom–field coupling: Rabi frequency of the guided drive and the
//! directional spontaneous-emission rates into guided and radiation modes.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::consts::{EPSILON_0, HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_kronrod;
use crate::radiation::RadiationBasis;
use crate::waveguide::{
    angular_frequency, guided_modes, mode_profile, quasilinear_drive_field, solve_dispersion,
    Circulation, Direction, FiberSpec, GuidedMode, ModeKind, Normalization,
};

/// Initial azimuthal truncation `|l| ≤ L` of the radiation sum.
pub const L_MAX_START: u32 = 10;
/// Hard ceiling on the azimuthal truncation.
pub const L_MAX_CEILING: u32 = 640;
/// Initial Gauss–Kronrod panels over the half range `0 < β < n2 k`.
pub const BETA_PANELS_START: usize = GRAZING_PANELS + BULK_PANELS;
/// Largest panel count before giving up.
pub const BETA_PANELS_CEILING: usize = 1000;
/// Relative change accepted by both refinement loops.
pub const RATE_TOLERANCE: f64 = 1e-4;

/// Named dipole orientations in the meridional `zx` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dipole {
    /// `(i x̂ − ẑ)/√2`
    SigmaPlus,
    /// `(−i x̂ − ẑ)/√2`
    SigmaMinus,
    /// `x̂`
    LinearX,
}

impl Dipole {
    /// Complex unit vector in Cartesian components.
    pub fn vector(self) -> [Complex64; 3] {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Dipole::SigmaPlus => [Complex64::new(0.0, s), zero, Complex64::new(-s, 0.0)],
            Dipole::SigmaMinus => [Complex64::new(0.0, -s), zero, Complex64::new(-s, 0.0)],
            Dipole::LinearX => [Complex64::new(1.0, 0.0), zero, zero],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dipole::SigmaPlus => "sigma+",
            Dipole::SigmaMinus => "sigma-",
            Dipole::LinearX => "linear-x",
        }
    }
}

impl fmt::Display for Dipole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dipole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigma+" | "sigma-plus" => Ok(Dipole::SigmaPlus),
            "sigma-" | "sigma-minus" => Ok(Dipole::SigmaMinus),
            "linear-x" | "x" => Ok(Dipole::LinearX),
            _ => Err(Error::Domain("dipole must be sigma+, sigma- or linear-x")),
        }
    }
}

/// `d = √(3πε₀ħc³γ₀/ω₀³)`
pub fn dipole_from_linewidth(gamma0: f64, omega0: f64) -> f64 {
    (3.0 * core::f64::consts::PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3) * gamma0
        / omega0.powi(3))
    .sqrt()
}

/// `γ₀ = ω₀³d²/(3πε₀ħc³)`
pub fn linewidth_from_dipole(d: f64, omega0: f64) -> f64 {
    omega0.powi(3) * d * d / (3.0 * core::f64::consts::PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3))
}

/// A two-level atom at rest outside the fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomConfig {
    /// Radial position (m).
    pub r: f64,
    /// Azimuthal position (rad).
    pub phi: f64,
    /// Unit dipole orientation `d_eg/d`, Cartesian `(x, y, z)`.
    pub dipole: [Complex64; 3],
    /// Transition wavelength (m).
    pub lambda0: f64,
    /// Dipole magnitude (C·m).
    pub d: f64,
}

impl AtomConfig {
    pub fn new(r: f64, phi: f64, dipole: [Complex64; 3], lambda0: f64, d: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain("atom radial position must be positive"));
        }
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(Error::Domain("transition wavelength must be positive"));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Domain("dipole magnitude must be positive"));
        }
        let norm: f64 = dipole.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("dipole orientation must be a unit vector"));
        }
        Ok(Self {
            r,
            phi,
            dipole,
            lambda0,
            d,
        })
    }

    /// Build from the free-space linewidth `γ₀` (rad/s) instead of `d`.
    pub fn with_linewidth(
        r: f64,
        phi: f64,
        dipole: [Complex64; 3],
        lambda0: f64,
        gamma0: f64,
    ) -> Result<Self> {
        if !(gamma0 > 0.0) {
            return Err(Error::Domain("linewidth must be positive"));
        }
        let d = dipole_from_linewidth(gamma0, angular_frequency(lambda0));
        Self::new(r, phi, dipole, lambda0, d)
    }

    pub fn omega0(&self) -> f64 {
        angular_frequency(self.lambda0)
    }

    pub fn gamma0(&self) -> f64 {
        linewidth_from_dipole(self.d, self.omega0())
    }

    /// Same atom at another radius.
    pub fn at_radius(&self, r: f64) -> Self {
        Self { r, ..*self }
    }

    fn check_outside(&self, fiber: &FiberSpec) -> Result<()> {
        if self.r <= fiber.radius {
            return Err(Error::Domain("atom must be outside the fiber"));
        }
        Ok(())
    }

    /// `d_eg · e` (bilinear, no conjugation) for a Cartesian field.
    fn project(&self, e: [Complex64; 3]) -> Complex64 {
        (self.dipole[0] * e[0] + self.dipole[1] * e[1] + self.dipole[2] * e[2]) * self.d
    }
}

/// Classical guided drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub kind: ModeKind,
    /// Polarization orientation for HE/EH modes (0 = x).
    pub orientation: f64,
    pub direction: Direction,
    /// Power (W).
    pub power: f64,
    /// Detuning `Δ = ω_L − ω₀` (rad/s).
    pub detuning: f64,
}

impl DriveConfig {
    pub fn new(
        kind: ModeKind,
        orientation: f64,
        direction: Direction,
        power: f64,
        detuning: f64,
    ) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::Domain("drive power must be non-negative"));
        }
        if !detuning.is_finite() || !orientation.is_finite() {
            return Err(Error::Domain("drive detuning and orientation must be finite"));
        }
        Ok(Self {
            kind,
            orientation,
            direction,
            power,
            detuning,
        })
    }

    /// Drive angular frequency `ω₀ + Δ`.
    pub fn omega(&self, atom: &AtomConfig) -> f64 {
        atom.omega0() + self.detuning
    }

    pub fn reversed(&self) -> Self {
        Self {
            direction: self.direction.reversed(),
            ..*self
        }
    }
}

/// Solve the drive mode at `ω_L`.
pub fn drive_mode(atom: &AtomConfig, drive: &DriveConfig, fiber: &FiberSpec) -> Result<GuidedMode> {
    solve_dispersion(fiber, drive.kind, drive.omega(atom))
}

/// `Ω = d_eg · 𝓔(r, φ)/ħ` for the quasilinearly polarized guided drive.
pub fn rabi_frequency(atom: &AtomConfig, drive: &DriveConfig, fiber: &FiberSpec) -> Result<Complex64> {
    let mode = drive_mode(atom, drive, fiber)?;
    rabi_frequency_with(atom, drive, &mode)
}

/// [`rabi_frequency`] with a pre-solved drive mode.
pub fn rabi_frequency_with(atom: &AtomConfig, drive: &DriveConfig, mode: &GuidedMode) -> Result<Complex64> {
    atom.check_outside(&mode.fiber)?;
    let field = quasilinear_drive_field(
        mode,
        drive.orientation,
        drive.direction,
        drive.power,
        atom.r,
        atom.phi,
    )?;
    Ok(atom.project(field.electric_cartesian()) / HBAR)
}

/// Emission rate into one guided mode family and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedEmission {
    /// Rate (rad/s); zero below cutoff.
    pub rate: f64,
    pub below_cutoff: bool,
}

/// `γ_gN^{(f)} = (ω₀β′/2ε₀ħ) Σ_p |d_eg · e^{(fp)}|²` with quantum-normalized
/// profiles at the atom.
pub fn guided_emission_rate(
    atom: &AtomConfig,
    fiber: &FiberSpec,
    kind: ModeKind,
    f: Direction,
) -> Result<GuidedEmission> {
    atom.check_outside(fiber)?;
    match solve_dispersion(fiber, kind, atom.omega0()) {
        Ok(mode) => Ok(GuidedEmission {
            rate: guided_emission_rate_with(atom, &mode, f)?,
            below_cutoff: false,
        }),
        Err(Error::NotGuided(_)) => Ok(GuidedEmission {
            rate: 0.0,
            below_cutoff: true,
        }),
        Err(e) => Err(e),
    }
}

/// [`guided_emission_rate`] for a mode already solved at `ω₀`.
pub fn guided_emission_rate_with(atom: &AtomConfig, mode: &GuidedMode, f: Direction) -> Result<f64> {
    atom.check_outside(&mode.fiber)?;
    let circulations: &[Circulation] = if mode.kind.l == 0 {
        &[Circulation::Plus]
    } else {
        &Circulation::BOTH
    };
    let mut sum = 0.0;
    for &p in circulations {
        let e = mode_profile(mode, atom.r, atom.phi, f, p, Normalization::Quantum)?;
        sum += atom.project(e.electric_cartesian()).norm_sqr();
    }
    Ok(mode.omega * mode.beta_prime / (2.0 * EPSILON_0 * HBAR) * sum)
}

/// Radiation emission rate per unit β and the truncation that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDensity {
    /// Rate per unit β (rad/s per rad/m).
    pub value: f64,
    /// Achieved azimuthal truncation `|l| ≤ l_max`.
    pub l_max: u32,
}

/// Per-`l` sum of `Σ_p |d·e|²` at `β` and, from the same modes with `e_z`
/// reversed, at `−β`.
fn radiation_terms(
    atom: &AtomConfig,
    fiber: &FiberSpec,
    omega: f64,
    beta: f64,
    l: i32,
) -> Result<(f64, f64)> {
    let basis = match RadiationBasis::new(fiber, omega, beta, l) {
        Ok(b) => b,
        Err(Error::Overflow(_)) => {
            // Y_l overflows only for |l| ≫ q·r, where J_l(q r_atom) makes the
            // term vanish to working precision.
            let q = ((fiber.n2 * omega / SPEED_OF_LIGHT).powi(2) - beta * beta).max(0.0).sqrt();
            if l.unsigned_abs() as f64 > 2.0 * q * atom.r + 10.0 {
                return Ok((0.0, 0.0));
            }
            return Err(Error::Overflow("radiation mode at low azimuthal order"));
        }
        Err(e) => return Err(e),
    };
    let (s, c) = atom.phi.sin_cos();
    let mut same = 0.0;
    let mut mirrored = 0.0;
    for p in Circulation::BOTH {
        let e = basis.field(p, atom.r, atom.phi)?;
        let ex = e.e_r * c - e.e_phi * s;
        let ey = e.e_r * s + e.e_phi * c;
        same += atom.project([ex, ey, e.e_z]).norm_sqr();
        mirrored += atom.project([ex, ey, -e.e_z]).norm_sqr();
    }
    Ok((same, mirrored))
}

/// `Σ_{|l| ≤ L}` of [`radiation_terms`], with `L` doubled from
/// [`L_MAX_START`] until the added orders change both sums by less than
/// [`RATE_TOLERANCE`].
fn radiation_node(atom: &AtomConfig, fiber: &FiberSpec, omega: f64, beta: f64) -> Result<(f64, f64, u32)> {
    let mut same = 0.0;
    let mut mirrored = 0.0;
    let mut done: i32 = -1;
    let mut l_max = L_MAX_START;
    loop {
        let (mut add_s, mut add_m) = (0.0, 0.0);
        for l in (done + 1)..=(l_max as i32) {
            let signs: &[i32] = if l == 0 { &[0] } else { &[l, -l] };
            for &ls in signs {
                let (s, m) = radiation_terms(atom, fiber, omega, beta, ls)?;
                add_s += s;
                add_m += m;
            }
        }
        let first = done < 0;
        same += add_s;
        mirrored += add_m;
        done = l_max as i32;
        if !first && add_s <= RATE_TOLERANCE * same && add_m <= RATE_TOLERANCE * mirrored {
            return Ok((same, mirrored, l_max));
        }
        if l_max >= L_MAX_CEILING {
            return Err(Error::NoConvergence {
                what: "radiation azimuthal sum",
                lower: L_MAX_START as f64,
                upper: l_max as f64,
                residual: add_s / same.max(f64::MIN_POSITIVE),
            });
        }
        l_max *= 2;
    }
}

/// `γ_r^{(β)} = (ω₀/2ε₀ħ) Σ_lp |d_eg · e^{(ν)}|²`.
pub fn radiation_rate_density(atom: &AtomConfig, fiber: &FiberSpec, beta: f64) -> Result<RateDensity> {
    atom.check_outside(fiber)?;
    let omega = atom.omega0();
    if !(beta.abs() < fiber.n2 * omega / SPEED_OF_LIGHT) {
        return Err(Error::Domain("radiation modes need |beta| < n2 k"));
    }
    let (same, _, l_max) = radiation_node(atom, fiber, omega, beta)?;
    Ok(RateDensity {
        value: omega / (2.0 * EPSILON_0 * HBAR) * same,
        l_max,
    })
}

/// `γ_r = ∫γ_r^{(β)} dβ` together with the recoil moment `∫βγ_r^{(β)} dβ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationRates {
    pub gamma_r: f64,
    /// `∫ β γ_r^{(β)} dβ` (rad/s · rad/m).
    pub moment: f64,
    pub l_max: u32,
    /// Density evaluations over the half range `0 < β < n2 k`.
    pub beta_nodes: usize,
}

/// The half range `0 < β < n2 k` is covered in two pieces joined into one
/// integration variable `x`: `s = ln q` from `q = GRAZING_FLOOR · n2 k` up to
/// `θ = GRAZING_ANGLE` for the grazing modes, where the density varies on a
/// logarithmic scale in `q` and near-cutoff resonances sit, then
/// `β = n2 k cos θ` for the rest.
const GRAZING_ANGLE: f64 = 0.3;
const GRAZING_FLOOR: f64 = 1e-6;
const GRAZING_PANELS: usize = 12;
const BULK_PANELS: usize = 3;

/// `(β, dβ/dx)` at the joined variable `x`.
fn beta_of(x: f64, kn: f64) -> (f64, f64) {
    let join = GRAZING_ANGLE.sin().ln();
    if x <= join {
        let q = kn * x.exp();
        let beta = ((kn - q) * (kn + q)).sqrt();
        (beta, q * q / beta)
    } else {
        let theta = GRAZING_ANGLE + (x - join);
        (kn * theta.cos(), kn * theta.sin())
    }
}

fn beta_breaks() -> Vec<f64> {
    let (lo, join) = (GRAZING_FLOOR.ln(), GRAZING_ANGLE.sin().ln());
    let hi = join + (core::f64::consts::FRAC_PI_2 - GRAZING_ANGLE);
    let mut breaks: Vec<f64> = (0..GRAZING_PANELS)
        .map(|i| lo + (join - lo) * i as f64 / GRAZING_PANELS as f64)
        .collect();
    breaks.extend((0..=BULK_PANELS).map(|i| join + (hi - join) * i as f64 / BULK_PANELS as f64));
    breaks
}

/// Integrate the radiation density over `(−n2 k₀, n2 k₀)` by adaptive
/// 15-point Gauss–Kronrod panels, bisected until the estimated error of `γ_r`
/// is within [`RATE_TOLERANCE`] of it and that of `∫βγ_r` within
/// `RATE_TOLERANCE · n2 k₀ γ_r`. Nodes at `±β` share one set of modes.
pub fn radiation_rates(atom: &AtomConfig, fiber: &FiberSpec) -> Result<RadiationRates> {
    atom.check_outside(fiber)?;
    let omega = atom.omega0();
    let kn = fiber.n2 * omega / SPEED_OF_LIGHT;
    let mut l_max = 0;
    let integrand = |x: f64| -> Result<[f64; 2]> {
        let (beta, jac) = beta_of(x, kn);
        let (plus, minus, l) = radiation_node(atom, fiber, omega, beta)?;
        l_max = l_max.max(l);
        Ok([jac * (plus + minus), jac * beta * (plus - minus)])
    };
    let result = adaptive_kronrod(
        &beta_breaks(),
        BETA_PANELS_CEILING,
        integrand,
        |v, e| e[0] <= RATE_TOLERANCE * v[0] && e[1] <= RATE_TOLERANCE * kn * v[0],
        |e| e[0].max(e[1] / kn),
    )
    .map_err(|e| match e {
        Error::NoConvergence { residual, .. } => Error::NoConvergence {
            what: "radiation beta quadrature",
            lower: -kn,
            upper: kn,
            residual,
        },
        other => other,
    })?;
    let pre = omega / (2.0 * EPSILON_0 * HBAR);
    Ok(RadiationRates {
        gamma_r: pre * result.value[0],
        moment: pre * result.value[1],
        l_max,
        beta_nodes: result.evaluations,
    })
}

/// Forward and backward emission into one guided mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedChannel {
    pub kind: ModeKind,
    /// `β₀^{(N)}` at `ω₀` (rad/m).
    pub beta0: f64,
    pub forward: f64,
    pub backward: f64,
}

/// All spontaneous-emission rates of the atom.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionRates {
    pub guided: Vec<GuidedChannel>,
    /// `Σ_N (γ_gN^{(+)} + γ_gN^{(−)})`
    pub gamma_g: f64,
    pub radiation: RadiationRates,
    /// `Γ = γ_g + γ_r`
    pub gamma_total: f64,
}

impl EmissionRates {
    pub fn gamma_r(&self) -> f64 {
        self.radiation.gamma_r
    }

    /// `Σ_N β₀^{(N)} (γ_gN^{(+)} − γ_gN^{(−)})`
    pub fn guided_moment(&self) -> f64 {
        self.guided
            .iter()
            .map(|c| c.beta0 * (c.forward - c.backward))
            .sum()
    }
}

/// Γ, γ_g and γ_r of the atom, over every guided mode at `ω₀`.
pub fn total_rates(atom: &AtomConfig, fiber: &FiberSpec) -> Result<EmissionRates> {
    let modes = guided_modes(fiber, atom.omega0())?;
    total_rates_with(atom, fiber, &modes)
}

/// [`total_rates`] with the guided modes at `ω₀` supplied by the caller.
pub fn total_rates_with(atom: &AtomConfig, fiber: &FiberSpec, modes: &[GuidedMode]) -> Result<EmissionRates> {
    let guided = guided_channels(atom, modes)?;
    let radiation = radiation_rates(atom, fiber)?;
    Ok(combine_rates(guided, radiation))
}

/// Per-mode forward/backward guided rates.
pub fn guided_channels(atom: &AtomConfig, modes: &[GuidedMode]) -> Result<Vec<GuidedChannel>> {
    modes
        .iter()
        .map(|m| {
            Ok(GuidedChannel {
                kind: m.kind,
                beta0: m.beta,
                forward: guided_emission_rate_with(atom, m, Direction::Forward)?,
                backward: guided_emission_rate_with(atom, m, Direction::Backward)?,
            })
        })
        .collect()
}

/// Assemble [`EmissionRates`] from separately computed pieces.
pub fn combine_rates(guided: Vec<GuidedChannel>, radiation: RadiationRates) -> EmissionRates {
    let gamma_g: f64 = guided.iter().map(|c| c.forward + c.backward).sum();
    EmissionRates {
        gamma_total: gamma_g + radiation.gamma_r,
        gamma_g,
        guided,
        radiation,
    }
}
