//! Radiation-mode continuum of the fiber.
//!
//! For each `(ω, β, l)` with `|β| < n2 k` the longitudinal fields are
//! `A J_l(hr)`, `B J_l(hr)` in the core and `a J_l(qr) + b Y_l(qr)` in the
//! cladding, `h = √(n1²k² − β²)`, `q = √(n2²k² − β²)`. Matching `E_z`, `H_z`,
//! `E_φ`, `H_φ` at `r = a` fixes the four cladding amplitudes as linear
//! functions of `(A, B)`. Delta normalization in `ω` and `β` reduces to the
//! Hermitian form
//!
//! `Q = (2πω/q²) [n2² (|a_E|² + |b_E|²) + (μ₀/ε₀)(|a_H|² + |b_H|²)] = 1`,
//!
//! and the two polarizations are its eigenvectors, so they are orthogonal
//! under the continuum inner product.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::consts::{EPSILON_0, MU_0, SPEED_OF_LIGHT, Z_0};
use crate::error::{Error, Result};
use crate::specfun::{cyl_bessel, BesselKind};
use crate::waveguide::{transverse_from_longitudinal, Circulation, FiberSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Label `ν = (ω, β, l, p)` of a radiation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadModeSpec {
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Axial propagation constant (rad/m), `|β| < n2 ω/c`.
    pub beta: f64,
    /// Azimuthal order, either sign.
    pub l: i32,
    /// Polarization: `Plus` is the eigenvector of the larger eigenvalue of
    /// the normalization form.
    pub p: Circulation,
}

impl RadModeSpec {
    pub fn new(fiber: &FiberSpec, omega: f64, beta: f64, l: i32, p: Circulation) -> Result<Self> {
        check_beta(fiber, omega, beta)?;
        Ok(Self { omega, beta, l, p })
    }
}

fn check_beta(fiber: &FiberSpec, omega: f64, beta: f64) -> Result<()> {
    if !(omega > 0.0) {
        return Err(Error::Domain("angular frequency must be positive"));
    }
    if !(beta.abs() < fiber.n2 * omega / SPEED_OF_LIGHT) {
        return Err(Error::Domain("radiation modes need |beta| < n2 k"));
    }
    Ok(())
}

/// Electric field of a radiation mode at `(r, φ)`, cylindrical basis,
/// including the azimuthal phase `e^{ilφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadField {
    pub r: f64,
    pub phi: f64,
    pub e_r: Complex64,
    pub e_phi: Complex64,
    pub e_z: Complex64,
}

impl RadField {
    pub fn electric(&self) -> [Complex64; 3] {
        [self.e_r, self.e_phi, self.e_z]
    }

    pub fn electric_cartesian(&self) -> [Complex64; 3] {
        let (s, c) = self.phi.sin_cos();
        [
            self.e_r * c - self.e_phi * s,
            self.e_r * s + self.e_phi * c,
            self.e_z,
        ]
    }
}

/// Both normalized polarizations of the radiation modes at fixed
/// `(ω, β, l)`.
///
/// Amplitude vectors are expressed in `x = (A, Z₀B)` so both entries carry
/// the same units.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationBasis {
    pub fiber: FiberSpec,
    pub omega: f64,
    pub beta: f64,
    pub l: i32,
    /// Core transverse wavenumber.
    pub h: f64,
    /// Cladding transverse wavenumber `q_rad`.
    pub q: f64,
    /// Rows `a_E, b_E, a_H, b_H` as linear maps of `x`.
    amplitudes: [[Complex64; 2]; 4],
    /// Normalization form `Q` in the `x` variables.
    form: [[Complex64; 2]; 2],
    /// Normalized amplitude vectors for `p = +` and `p = −`.
    modes: [[Complex64; 2]; 2],
}

impl RadiationBasis {
    pub fn new(fiber: &FiberSpec, omega: f64, beta: f64, l: i32) -> Result<Self> {
        check_beta(fiber, omega, beta)?;
        let k = omega / SPEED_OF_LIGHT;
        let a = fiber.radius;
        let (n1, n2) = (fiber.n1, fiber.n2);
        let h = ((n1 * k - beta) * (n1 * k + beta)).sqrt();
        let q = ((n2 * k - beta) * (n2 * k + beta)).sqrt();
        if !(q > 0.0) || !(h > 0.0) {
            return Err(Error::Domain("radiation modes need |beta| < n2 k"));
        }
        let order = l.unsigned_abs();
        let (u, w) = (h * a, q * a);
        let ju = cyl_bessel(BesselKind::J, order, u)?;
        let jw = cyl_bessel(BesselKind::J, order, w)?;
        let yw = cyl_bessel(BesselKind::Y, order, w)?;
        if !(yw.value.is_finite() && yw.derivative.is_finite()) {
            return Err(Error::Overflow("Y_l at the fiber surface"));
        }

        // Columns: unit A, unit Z₀B.
        let ibl = I * (beta * l as f64 / a);
        let mix = 1.0 / (h * h) - 1.0 / (q * q);
        let eps_ratio = (n1 * n1) / (n2 * n2);
        let wronski = 0.5 * core::f64::consts::PI * w;
        let mut amplitudes = [[ZERO; 2]; 4];
        for col in 0..2 {
            let (amp_a, amp_b) = if col == 0 {
                (Complex64::new(1.0, 0.0), ZERO)
            } else {
                (ZERO, Complex64::new(1.0 / Z_0, 0.0))
            };
            let ez = amp_a * ju.value;
            let hz = amp_b * ju.value;
            // d/d(qr) of the cladding E_z and H_z at r = a.
            let rez = ibl * amp_b * ju.value * (q * mix / (omega * EPSILON_0 * n2 * n2))
                + amp_a * ju.derivative * (eps_ratio * q / h);
            let rhz = ibl * amp_a * ju.value * (-q * mix / (omega * MU_0))
                + amp_b * ju.derivative * (q / h);
            amplitudes[0][col] = (ez * yw.derivative - rez * yw.value) * wronski;
            amplitudes[1][col] = (rez * jw.value - ez * jw.derivative) * wronski;
            amplitudes[2][col] = (hz * yw.derivative - rhz * yw.value) * wronski;
            amplitudes[3][col] = (rhz * jw.value - hz * jw.derivative) * wronski;
        }

        // Work with amplitudes scaled to unit size so that the form and its
        // determinant stay representable at large |l|.
        let scale = amplitudes
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Overflow("radiation mode amplitudes"));
        }
        let unit = amplitudes.map(|row| row.map(|c| c / scale));
        let pre = 2.0 * core::f64::consts::PI * omega / (q * q);
        let weights = [n2 * n2, n2 * n2, MU_0 / EPSILON_0, MU_0 / EPSILON_0];
        let mut unit_form = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut s = ZERO;
                for (row, wt) in unit.iter().zip(weights) {
                    s += row[i].conj() * row[j] * wt;
                }
                unit_form[i][j] = s * pre;
            }
        }
        if !unit_form.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Overflow("radiation mode normalization"));
        }
        // Cauchy–Binet keeps the determinant free of cancellation when the
        // eigenvalues differ by many orders of magnitude (grazing modes).
        let mut det = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                let minor = unit[i][0] * unit[j][1] - unit[i][1] * unit[j][0];
                det += weights[i] * weights[j] * minor.norm_sqr();
            }
        }
        let modes = orthonormal_eigenvectors(&unit_form, det * pre * pre)?.map(|v| v.map(|c| c / scale));
        let form = unit_form.map(|row| row.map(|c| c * (scale * scale)));
        Ok(Self {
            fiber: *fiber,
            omega,
            beta,
            l,
            h,
            q,
            amplitudes,
            form,
            modes,
        })
    }

    /// The normalization form `Q` in the `(A, Z₀B)` variables.
    pub fn normalization_form(&self) -> [[Complex64; 2]; 2] {
        self.form
    }

    /// Normalized `(A, Z₀B)` of polarization `p`.
    pub fn amplitudes(&self, p: Circulation) -> [Complex64; 2] {
        match p {
            Circulation::Plus => self.modes[0],
            Circulation::Minus => self.modes[1],
        }
    }

    /// Electric field of the mode with core amplitudes `x = (A, Z₀B)`.
    pub fn field_of(&self, x: [Complex64; 2], r: f64, phi: f64) -> Result<RadField> {
        let [er, ephi, ez, _, _, _] = self.components(x, r)?;
        let phase = Complex64::from_polar(1.0, self.l as f64 * phi);
        Ok(RadField {
            r,
            phi,
            e_r: er * phase,
            e_phi: ephi * phase,
            e_z: ez * phase,
        })
    }

    pub fn field(&self, p: Circulation, r: f64, phi: f64) -> Result<RadField> {
        self.field_of(self.amplitudes(p), r, phi)
    }

    /// `[e_r, e_φ, e_z, h_r, h_φ, h_z]` at `r` without the azimuthal phase.
    pub(crate) fn components(&self, x: [Complex64; 2], r: f64) -> Result<[Complex64; 6]> {
        self.components_on(x, r, r < self.fiber.radius)
    }

    pub(crate) fn components_on(
        &self,
        x: [Complex64; 2],
        r: f64,
        core: bool,
    ) -> Result<[Complex64; 6]> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain("radial position must be positive"));
        }
        let order = self.l.unsigned_abs();
        let (a_amp, b_amp) = (x[0], x[1] / Z_0);
        let (n, kappa, ez, dez, hz, dhz) = if core {
            let j = cyl_bessel(BesselKind::J, order, self.h * r)?;
            (
                self.fiber.n1,
                self.h,
                a_amp * j.value,
                a_amp * (self.h * j.derivative),
                b_amp * j.value,
                b_amp * (self.h * j.derivative),
            )
        } else {
            let s = self.q * r;
            let j = cyl_bessel(BesselKind::J, order, s)?;
            let y = cyl_bessel(BesselKind::Y, order, s)?;
            let amp = |row: usize| self.amplitudes[row][0] * x[0] + self.amplitudes[row][1] * x[1];
            let (ae, be, ah, bh) = (amp(0), amp(1), amp(2), amp(3));
            (
                self.fiber.n2,
                self.q,
                ae * j.value + be * y.value,
                (ae * j.derivative + be * y.derivative) * self.q,
                ah * j.value + bh * y.value,
                (ah * j.derivative + bh * y.derivative) * self.q,
            )
        };
        let [er, ephi, hr, hphi] = transverse_from_longitudinal(
            self.omega,
            self.beta,
            self.l as f64,
            n * n,
            kappa * kappa,
            r,
            ez,
            dez,
            hz,
            dhz,
        );
        Ok([er, ephi, ez, hr, hphi, hz])
    }
}

/// Eigenvectors of a 2×2 Hermitian positive form with determinant `det`,
/// scaled to `x†Qx = 1`, larger eigenvalue first.
fn orthonormal_eigenvectors(q: &[[Complex64; 2]; 2], det: f64) -> Result<[[Complex64; 2]; 2]> {
    let p = q[0][0].re;
    let s = q[1][1].re;
    let c = q[0][1];
    let mean = 0.5 * (p + s);
    let half = (0.25 * (p - s) * (p - s) + c.norm_sqr()).sqrt();
    let hi = mean + half;
    let lo = det / hi;
    if !(lo > 0.0) {
        return Err(Error::Domain("radiation normalization form is not positive"));
    }
    let vector = |lambda: f64, fallback: usize| -> [Complex64; 2] {
        let v1 = [c, Complex64::new(lambda - p, 0.0)];
        let v2 = [Complex64::new(lambda - s, 0.0), c.conj()];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n <= 1e-28 * (p * p + s * s) {
            let mut e = [ZERO; 2];
            e[fallback] = Complex64::new(1.0, 0.0);
            return e;
        }
        let norm = n.sqrt();
        [v[0] / norm, v[1] / norm]
    };
    // Degenerate forms (free space with n2 = 1) fall back to (A, B) axes.
    let (fb_hi, fb_lo) = if p >= s { (0, 1) } else { (1, 0) };
    let vh = vector(hi, fb_hi);
    let vl = vector(lo, fb_lo);
    let sh = 1.0 / hi.sqrt();
    let sl = 1.0 / lo.sqrt();
    Ok([[vh[0] * sh, vh[1] * sh], [vl[0] * sl, vl[1] * sl]])
}

/// Delta-normalized radiation-mode profile `e^{(ν)}` at `(r, φ)`.
pub fn radiation_profile(fiber: &FiberSpec, spec: RadModeSpec, r: f64, phi: f64) -> Result<RadField> {
    RadiationBasis::new(fiber, spec.omega, spec.beta, spec.l)?.field(spec.p, r, phi)
}
