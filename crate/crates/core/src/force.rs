//! Steady-state populations, the axial force and its recoil breakdown,
//! the force asymmetry and the transverse spin of the drive.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::consts::{EPSILON_0, HBAR, SPEED_OF_LIGHT};
use crate::coupling::{drive_mode, rabi_frequency_with, total_rates, AtomConfig, DriveConfig, EmissionRates};
use crate::error::{Error, Result};
use crate::waveguide::{Direction, FiberSpec, GuidedMode, VectorField};

/// Steady state of the driven two-level atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub rho_ee: f64,
    pub rho_eg: Complex64,
}

impl SteadyState {
    pub fn rho_ge(&self) -> Complex64 {
        self.rho_eg.conj()
    }

    /// `(i/2)(Ω ρ_ge − Ω* ρ_eg)`, the absorption rate in coherence form.
    pub fn absorption_rate(&self, rabi: Complex64) -> f64 {
        let i = Complex64::new(0.0, 1.0);
        (i * 0.5 * (rabi * self.rho_ge() - rabi.conj() * self.rho_eg)).re
    }
}

/// `ρ_ee = (|Ω|²/4)/(Δ² + Γ²/4 + |Ω|²/2)` and `ρ_eg = iΩ(1 − 2ρ_ee)/(Γ − 2iΔ)`.
pub fn steady_state(rabi: Complex64, detuning: f64, gamma: f64) -> Result<SteadyState> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain("decay rate must be positive"));
    }
    if !(detuning.is_finite() && rabi.re.is_finite() && rabi.im.is_finite()) {
        return Err(Error::Domain("Rabi frequency and detuning must be finite"));
    }
    let o2 = rabi.norm_sqr();
    let damping = detuning * detuning + 0.25 * gamma * gamma;
    let denom = damping + 0.5 * o2;
    let rho_ee = 0.25 * o2 / denom;
    // 1 − 2ρ_ee without the cancellation at saturation.
    let inversion = damping / denom;
    let rho_eg = Complex64::new(0.0, 1.0) * rabi * inversion / Complex64::new(gamma, -2.0 * detuning);
    Ok(SteadyState { rho_ee, rho_eg })
}

/// Axial force and everything it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    pub direction: Direction,
    /// Total axial force (N).
    pub f_z: f64,
    /// `ħ f β_L Γ ρ_ee`
    pub f_absorption: f64,
    /// `(iħ f β_L/2)(Ω ρ_ge − Ω* ρ_eg)`, equal to `f_absorption` at steady state.
    pub f_absorption_coherence: f64,
    /// `−ħ ρ_ee Σ_N β₀^{(N)} (γ_gN^{(+)} − γ_gN^{(−)})`
    pub f_guided_recoil: f64,
    /// `−ħ ρ_ee ∫ β γ_r^{(β)} dβ`
    pub f_radiation_recoil: f64,
    pub rho_ee: f64,
    pub rho_eg: Complex64,
    /// `Γ` (rad/s)
    pub gamma: f64,
    pub gamma_g: f64,
    pub gamma_r: f64,
    /// `|Ω|` (rad/s)
    pub omega_abs: f64,
    /// Drive propagation constant `β_L` (rad/m).
    pub beta_l: f64,
}

/// Axial force on the atom for one guided drive.
pub fn axial_force(atom: &AtomConfig, drive: &DriveConfig, fiber: &FiberSpec) -> Result<ForceResult> {
    let mode = drive_mode(atom, drive, fiber)?;
    let rates = total_rates(atom, fiber)?;
    axial_force_with(atom, drive, &mode, &rates)
}

/// [`axial_force`] with the drive mode at `ω₀ + Δ` and the atom's emission
/// rates supplied by the caller.
pub fn axial_force_with(
    atom: &AtomConfig,
    drive: &DriveConfig,
    mode: &GuidedMode,
    rates: &EmissionRates,
) -> Result<ForceResult> {
    let rabi = rabi_frequency_with(atom, drive, mode)?;
    let gamma = rates.gamma_total;
    let state = steady_state(rabi, drive.detuning, gamma)?;
    let fb = drive.direction.sign() * mode.beta;
    let f_absorption = HBAR * fb * gamma * state.rho_ee;
    let f_absorption_coherence = HBAR * fb * state.absorption_rate(rabi);
    let f_guided_recoil = -HBAR * state.rho_ee * rates.guided_moment();
    let f_radiation_recoil = -HBAR * state.rho_ee * rates.radiation.moment;
    Ok(ForceResult {
        direction: drive.direction,
        f_z: f_absorption + f_guided_recoil + f_radiation_recoil,
        f_absorption,
        f_absorption_coherence,
        f_guided_recoil,
        f_radiation_recoil,
        rho_ee: state.rho_ee,
        rho_eg: state.rho_eg,
        gamma,
        gamma_g: rates.gamma_g,
        gamma_r: rates.gamma_r(),
        omega_abs: rabi.norm(),
        beta_l: mode.beta,
    })
}

/// `η = (|F⁺| − |F⁻|)/(|F⁺| + |F⁻|)`
pub fn asymmetry(f_plus: f64, f_minus: f64) -> Result<f64> {
    if !(f_plus.is_finite() && f_minus.is_finite()) {
        return Err(Error::Domain("forces must be finite"));
    }
    let (p, m) = (f_plus.abs(), f_minus.abs());
    if p + m == 0.0 {
        return Err(Error::UndefinedAsymmetry);
    }
    Ok((p - m) / (p + m))
}

/// `η∞ = 2βq/(β² + q²)`
pub fn eta_infinity(beta_l: f64, q_l: f64) -> Result<f64> {
    if !(beta_l > 0.0 && q_l >= 0.0 && beta_l.is_finite() && q_l.is_finite()) {
        return Err(Error::Domain("eta_infinity needs beta > 0 and q >= 0"));
    }
    Ok(2.0 * beta_l * q_l / (beta_l * beta_l + q_l * q_l))
}

/// `2n1√(n1² − n2²)/(2n1² − n2²)`, the supremum of `η∞` over guided modes.
pub fn eta_infinity_bound(n1: f64, n2: f64) -> f64 {
    2.0 * n1 * (n1 * n1 - n2 * n2).sqrt() / (2.0 * n1 * n1 - n2 * n2)
}

/// `2 Im(e_r e_z*)/(|e_r|² + |e_z|²)` of the forward field, the large-distance
/// form of η for a σ⁺ dipole.
pub fn field_chirality(field: &VectorField) -> f64 {
    2.0 * (field.e_r * field.e_z.conj()).im / (field.e_r.norm_sqr() + field.e_z.norm_sqr())
}

/// `(ε₀/4ω) Im[E* × E] · ŷ`
pub fn transverse_spin_density(field: &VectorField, omega: f64) -> f64 {
    let [ex, _, ez] = field.electric_cartesian();
    EPSILON_0 / (4.0 * omega) * (ez.conj() * ex - ex.conj() * ez).im
}

/// Photon momentum `ħω₀/c` times `Γ`, the natural force scale of the atom.
pub fn force_scale(atom: &AtomConfig, gamma: f64) -> f64 {
    HBAR * atom.omega0() / SPEED_OF_LIGHT * gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{guided_channels, Dipole};
    use crate::waveguide::{
        angular_frequency, guided_modes, quasilinear_drive_field, ModeKind};
    use proptest::prelude::*;

    const LAMBDA: f64 = 780e-9;
    const GAMMA0: f64 = 2.0 * core::f64::consts::PI * 6.065e6;

    fn fiber() -> FiberSpec {
        FiberSpec::new(350e-9, 1.4537, 1.0).unwrap()
    }

    fn atom(r: f64, dipole: Dipole) -> AtomConfig {
        AtomConfig::with_linewidth(r, 0.0, dipole.vector(), LAMBDA, GAMMA0).unwrap()
    }

    fn drive(kind: ModeKind, f: Direction) -> DriveConfig {
        DriveConfig::new(kind, 0.0, f, 1e-12, 0.0).unwrap()
    }

    #[test]
    fn steady_state_examples() {
        let s = steady_state(Complex64::new(0.0, 0.0), 3.0, 1.0).unwrap();
        assert_eq!(s.rho_ee, 0.0);
        assert_eq!(s.rho_eg, Complex64::new(0.0, 0.0));
        let g: f64 = 2.0;
        let s = steady_state(Complex64::new(g / 2f64.sqrt(), 0.0), 0.0, g).unwrap();
        assert!((s.rho_ee - 0.25).abs() < 1e-16);
        let s = steady_state(Complex64::new(1e9, 0.0), 0.0, 1.0).unwrap();
        assert!((s.rho_ee - 0.5).abs() < 1e-15);
        assert!(steady_state(Complex64::new(1.0, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn asymmetry_examples() {
        assert_eq!(asymmetry(2.0, -2.0).unwrap(), 0.0);
        assert_eq!(asymmetry(1e-20, 0.0).unwrap(), 1.0);
        assert_eq!(asymmetry(3.0, -1.0).unwrap(), 0.5);
        assert_eq!(asymmetry(0.0, 0.0), Err(Error::UndefinedAsymmetry));
    }

    #[test]
    fn eta_infinity_examples() {
        assert_eq!(eta_infinity(2.5, 2.5).unwrap(), 1.0);
        assert_eq!(eta_infinity(2.5, 0.0).unwrap(), 0.0);
        assert!(eta_infinity(0.0, 1.0).is_err());
        // 2·1.4537·√(1.4537² − 1)/(2·1.4537² − 1), worked by hand.
        assert!((eta_infinity_bound(1.4537, 1.0) - 0.950_82).abs() < 1e-4);
    }

    #[test]
    fn eta_infinity_of_guided_modes_respects_bound() {
        let f = fiber();
        let modes = guided_modes(&f, angular_frequency(LAMBDA)).unwrap();
        let bound = eta_infinity_bound(f.n1, f.n2);
        for m in &modes {
            assert!(eta_infinity(m.beta, m.q).unwrap() < bound);
        }
    }

    #[test]
    fn spin_density_examples() {
        let f = fiber();
        let mode = crate::waveguide::solve_dispersion(&f, ModeKind::HE11, angular_frequency(LAMBDA)).unwrap();
        let r = 10.0 * f.radius;
        let omega = mode.omega;
        let fw = quasilinear_drive_field(&mode, 0.0, Direction::Forward, 1e-12, r, 0.0).unwrap();
        let bw = quasilinear_drive_field(&mode, 0.0, Direction::Backward, 1e-12, r, 0.0).unwrap();
        let sf = transverse_spin_density(&fw, omega);
        let sb = transverse_spin_density(&bw, omega);
        assert!(sf != 0.0);
        assert!((sf + sb).abs() <= 1e-14 * sf.abs());

        let mut linear = fw;
        linear.e_r = Complex64::new(1.0, 0.0);
        linear.e_phi = Complex64::new(0.0, 0.0);
        linear.e_z = Complex64::new(-0.4, 0.0);
        assert_eq!(transverse_spin_density(&linear, omega), 0.0);

        let a = atom(r, Dipole::SigmaPlus);
        let plus = axial_force(&a, &drive(ModeKind::HE11, Direction::Forward), &f).unwrap();
        let minus = axial_force(&a, &drive(ModeKind::HE11, Direction::Backward), &f).unwrap();
        let eta = asymmetry(plus.f_z, minus.f_z).unwrap();
        assert_eq!(eta.signum(), sf.signum());
    }

    #[test]
    fn te_drive_gives_zero_force_and_undefined_asymmetry() {
        let f = fiber();
        let a = atom(370e-9, Dipole::SigmaPlus);
        let plus = axial_force(&a, &drive(ModeKind::TE01, Direction::Forward), &f).unwrap();
        let minus = axial_force(&a, &drive(ModeKind::TE01, Direction::Backward), &f).unwrap();
        assert_eq!(plus.f_z, 0.0);
        assert_eq!(plus.rho_ee, 0.0);
        assert_eq!(asymmetry(plus.f_z, minus.f_z), Err(Error::UndefinedAsymmetry));
    }

    #[test]
    fn linear_dipole_has_no_recoil() {
        let f = fiber();
        let a = atom(380e-9, Dipole::LinearX);
        for kind in [ModeKind::HE11, ModeKind::TM01] {
            let res = axial_force(&a, &drive(kind, Direction::Forward), &f).unwrap();
            assert_eq!(res.f_guided_recoil, 0.0);
            assert!(res.f_radiation_recoil.abs() <= 1e-8 * res.f_absorption.abs());
            assert!(res.f_absorption > 0.0);
        }
    }

    #[test]
    fn breakdown_sums_and_coherence_form_agrees() {
        let f = fiber();
        let a = atom(380e-9, Dipole::SigmaPlus);
        for dir in Direction::BOTH {
            let res = axial_force(&a, &drive(ModeKind::HE11, dir), &f).unwrap();
            let sum = res.f_absorption + res.f_guided_recoil + res.f_radiation_recoil;
            assert!((res.f_z - sum).abs() <= 1e-14 * res.f_z.abs());
            assert!((res.f_absorption_coherence / res.f_absorption - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_mapping_at_force_level() {
        let f = fiber();
        let modes = guided_modes(&f, angular_frequency(LAMBDA)).unwrap();
        for r in [360e-9, 500e-9] {
            let sp = atom(r, Dipole::SigmaPlus);
            let sm = atom(r, Dipole::SigmaMinus);
            let rp = total_rates(&sp, &f).unwrap();
            let rm = crate::coupling::combine_rates(
                guided_channels(&sm, &modes).unwrap(),
                crate::coupling::radiation_rates(&sm, &f).unwrap(),
            );
            for kind in [ModeKind::HE11, ModeKind::TM01, ModeKind::HE21] {
                let mode = drive_mode(&sp, &drive(kind, Direction::Forward), &f).unwrap();
                let force = |a: &AtomConfig, rates: &EmissionRates, d| {
                    axial_force_with(a, &drive(kind, d), &mode, rates).unwrap().f_z
                };
                let pp = force(&sp, &rp, Direction::Forward);
                let pm = force(&sp, &rp, Direction::Backward);
                let mp = force(&sm, &rm, Direction::Forward);
                let mm = force(&sm, &rm, Direction::Backward);
                assert!((mp + pm).abs() <= 4.0 * f64::EPSILON * pm.abs(), "{kind} {mp} {pm}");
                assert!((mm + pp).abs() <= 4.0 * f64::EPSILON * pp.abs(), "{kind} {mm} {pp}");
            }
        }
    }

    #[test]
    fn chirality_near_surface() {
        let f = fiber();
        let a = atom(f.radius + 20e-9, Dipole::SigmaPlus);
        let plus = axial_force(&a, &drive(ModeKind::HE11, Direction::Forward), &f).unwrap();
        let minus = axial_force(&a, &drive(ModeKind::HE11, Direction::Backward), &f).unwrap();
        assert!(plus.f_z > 0.0 && minus.f_z < 0.0);
        assert!(asymmetry(plus.f_z, minus.f_z).unwrap() > 0.9);
    }

    #[test]
    fn field_chirality_tends_to_eta_infinity() {
        // The approach is O(1/qr): extrapolate from 40a and 80a.
        let f = fiber();
        let modes = guided_modes(&f, angular_frequency(LAMBDA)).unwrap();
        let chi = |m, k: f64| {
            let e = quasilinear_drive_field(m, 0.0, Direction::Forward, 1e-12, k * f.radius, 0.0).unwrap();
            assert!(e.e_phi.norm() <= 1e-12 * e.e_r.norm());
            field_chirality(&e)
        };
        for m in modes.iter().filter(|m| m.kind != ModeKind::TE01) {
            let want = eta_infinity(m.beta, m.q).unwrap();
            let (near, far) = (chi(m, 40.0), chi(m, 80.0));
            assert!((far - want).abs() < (near - want).abs(), "{}", m.kind);
            assert!((2.0 * far - near - want).abs() < 1e-3, "{}", m.kind);
        }
        let he11 = &modes[0];
        assert_eq!(he11.kind, ModeKind::HE11);
        assert!((chi(he11, 10.0) - eta_infinity(he11.beta, he11.q).unwrap()).abs() < 1e-2);
    }

    #[test]
    fn tm_chirality_follows_bessel_ratio() {
        // Outside, TM0 has e_z/e_r = −i(q/β)K₀(qr)/K₁(qr).
        use crate::specfun::{cyl_bessel_scaled, BesselKind};
        let f = fiber();
        let m = crate::waveguide::solve_dispersion(&f, ModeKind::TM01, angular_frequency(LAMBDA)).unwrap();
        for r in [1.2 * f.radius, 3.0 * f.radius, 10.0 * f.radius] {
            let e = quasilinear_drive_field(&m, 0.0, Direction::Forward, 1e-12, r, 0.0).unwrap();
            let x = m.q * r;
            let rho = cyl_bessel_scaled(BesselKind::K, 0, x).unwrap().value
                / cyl_bessel_scaled(BesselKind::K, 1, x).unwrap().value;
            let t = m.q / m.beta * rho;
            let want = 2.0 * t / (1.0 + t * t);
            assert!((field_chirality(&e) - want).abs() < 1e-12, "{r}");
        }
    }

    proptest! {
        #[test]
        fn steady_state_is_stationary(
            re in -1e8f64..1e8, im in -1e8f64..1e8, delta in -1e8f64..1e8, gamma in 1e5f64..1e8,
        ) {
            let rabi = Complex64::new(re, im);
            let s = steady_state(rabi, delta, gamma).unwrap();
            prop_assert!(s.rho_ee >= 0.0 && s.rho_ee <= 0.5);
            let closed = 0.25 * rabi.norm_sqr() / (delta * delta + 0.25 * gamma * gamma + 0.5 * rabi.norm_sqr());
            prop_assert!((s.rho_ee - closed).abs() <= 1e-15 * closed.max(1e-300));
            let lhs = s.absorption_rate(rabi);
            let rhs = gamma * s.rho_ee;
            // Im(Ω*ρ_eg) is Γ/2|Δ| times smaller than |Ω*ρ_eg|.
            let cond = 1.0 + 2.0 * delta.abs() / gamma;
            prop_assert!((lhs - rhs).abs() <= 1e-14 * cond * rhs.abs().max(f64::MIN_POSITIVE), "{lhs} {rhs}");
        }

        #[test]
        fn global_phase_leaves_population_unchanged(
            mag in 0.0f64..1e8, phase in 0.0f64..6.3, delta in -1e8f64..1e8, gamma in 1e5f64..1e8,
        ) {
            let a = steady_state(Complex64::new(mag, 0.0), delta, gamma).unwrap();
            let b = steady_state(Complex64::from_polar(mag, phase), delta, gamma).unwrap();
            prop_assert!((a.rho_ee - b.rho_ee).abs() <= 1e-15);
        }

        #[test]
        fn asymmetry_is_bounded_and_antisymmetric(p in -1e3f64..1e3, m in -1e3f64..1e3) {
            prop_assume!(p != 0.0 || m != 0.0);
            let e = asymmetry(p, m).unwrap();
            prop_assert!((-1.0..=1.0).contains(&e));
            prop_assert_eq!(asymmetry(m, p).unwrap(), -e);
        }

        #[test]
        fn eta_infinity_below_index_bound(neff in 1.0001f64..1.4536) {
            let k = 8e6;
            let beta = neff * k;
            let q = (beta * beta - k * k).sqrt();
            let e = eta_infinity(beta, q).unwrap();
            prop_assert!(e <= 1.0);
            prop_assert!(e < eta_infinity_bound(1.4537, 1.0));
        }
    }
}
