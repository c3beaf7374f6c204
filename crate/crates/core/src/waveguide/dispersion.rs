//! Characteristic equation, root bracketing and group slowness.
//!
//! Roots are searched in the angle θ with `u = V sin θ`, `w = V cos θ`
//! (`u = ha`, `w = qa`), which keeps `u² + w² = V²` exact and resolves both
//! ends of the guided interval: `u → 0` (β → n1 k) and `w → 0` (cutoff).
//! Increasing θ is decreasing β, so the m-th sign change is the m-th mode.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::field::build_mode;
use super::{FiberSpec, GuidedMode, ModeFamily, ModeKind};
use crate::consts::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::specfun::{cyl_bessel, cyl_bessel_scaled, BesselKind};

/// Samples per scan of the guided interval.
const SCAN_SAMPLES: usize = 2048;
/// Roots with `qa` below this are treated as being at cutoff.
pub(crate) const W_GUARD: f64 = 1e-8;
/// Largest acceptable normalized residual of a refined root, relaxed by
/// `1 + 1/(qa)²` near cutoff where the `1/(qa)²` terms dominate.
const MAX_RESIDUAL: f64 = 1e-10;
/// Relative frequency step of the slowness finite difference.
const SLOWNESS_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Root {
    pub u: f64,
    pub w: f64,
}

/// Ratios entering the characteristic equation at `(u, w)`.
struct Ratios {
    /// `J_l'(u) / u`
    jd: f64,
    /// `J_l(u)`
    j: f64,
    /// `K_l'(w) / (w K_l(w)) = −l/w² − rho`
    kr: f64,
    /// `K_{l−1}(w) / (w K_l(w))` (with `K_{−1} = K_1`)
    rho: f64,
}

fn ratios(l: u32, u: f64, w: f64) -> Result<Ratios> {
    let j = cyl_bessel(BesselKind::J, l, u)?;
    let k = cyl_bessel_scaled(BesselKind::K, l, w)?;
    let below = cyl_bessel_scaled(BesselKind::K, l.abs_diff(1), w)?;
    let rho = below.value / (w * k.value);
    Ok(Ratios {
        jd: j.derivative / u,
        j: j.value,
        kr: -(l as f64) / (w * w) - rho,
        rho,
    })
}

/// Branch function whose zeros are the roots of one mode family, multiplied
/// through by `J_l(u)` so it is continuous on the whole interval.
///
/// Hybrid modes solve the quadratic in `𝒥 = J'/(uJ)`:
/// `𝒥 = −(n1²+n2²)/(2n1²) 𝒦 ∓ √(((n1²−n2²)/(2n1²))² 𝒦² + (βl/(n1 k))² S²)`,
/// `S = 1/u² + 1/w²`, with the lower sign giving HE and the upper EH.
/// On the HE branch the two terms cancel to leading order in `1/w²` near
/// cutoff, so it is evaluated as the rationalized quotient
/// `(n2𝒦 − (βl/k)S)(n2𝒦 + (βl/k)S) / (n1² (−c1𝒦 + √…))` with the small
/// factor expanded analytically.
fn branch_value(fiber: &FiberSpec, family: ModeFamily, l: u32, k: f64, root: Root) -> Result<f64> {
    let Root { u, w } = root;
    let r = ratios(l, u, w)?;
    let (n1s, n2s) = (fiber.n1 * fiber.n1, fiber.n2 * fiber.n2);
    let value = match family {
        ModeFamily::TE => r.jd + r.j * r.kr,
        ModeFamily::TM => n1s * r.jd + n2s * r.j * r.kr,
        ModeFamily::HE | ModeFamily::EH => {
            let beta = beta_from_w(fiber, k, w);
            let lf = l as f64;
            let s = 1.0 / (u * u) + 1.0 / (w * w);
            let c1 = (n1s + n2s) / (2.0 * n1s);
            let c2 = (n1s - n2s) / (2.0 * n1s);
            let t = beta * lf / (fiber.n1 * k);
            let radical = (c2 * c2 * r.kr * r.kr + t * t * s * s).sqrt();
            let rhs = if family == ModeFamily::EH {
                -c1 * r.kr + radical
            } else {
                let a = fiber.radius;
                let bl = beta * lf / k;
                // n2𝒦 + (βl/k)S with (β/k − n2)/w² = 1/(a² k (β + n2 k)).
                let small = lf / (a * a * k * (beta + fiber.n2 * k)) - fiber.n2 * r.rho
                    + bl / (u * u);
                let large = fiber.n2 * r.kr - bl * s;
                large * small / (n1s * (-c1 * r.kr + radical))
            };
            r.jd - r.j * rhs
        }
    };
    Ok(value)
}

fn beta_from_w(fiber: &FiberSpec, k: f64, w: f64) -> f64 {
    let qn = w / fiber.radius;
    (fiber.n2 * fiber.n2 * k * k + qn * qn).sqrt()
}

/// Normalized residual of the full (branch-free) characteristic equation,
/// `|(𝒥+𝒦)(n1²𝒥+n2²𝒦) − (βl/k)² S²|` scaled by the sum of the magnitudes of
/// its terms, with everything multiplied through by `J_l(u)²`. TE and TM use
/// their own factor of the `l = 0` equation.
pub(crate) fn residual_uw(fiber: &FiberSpec, kind: ModeKind, k: f64, root: Root) -> f64 {
    let Root { u, w } = root;
    let r = match ratios(kind.l, u, w) {
        Ok(r) => r,
        Err(_) => return f64::INFINITY,
    };
    let (n1s, n2s) = (fiber.n1 * fiber.n1, fiber.n2 * fiber.n2);
    let jk = r.j * r.kr;
    match kind.family {
        ModeFamily::TE => (r.jd + jk).abs() / (r.jd.abs() + jk.abs()),
        ModeFamily::TM => (n1s * r.jd + n2s * jk).abs() / (n1s * r.jd.abs() + n2s * jk.abs()),
        ModeFamily::HE | ModeFamily::EH => {
            let beta = beta_from_w(fiber, k, w);
            let s = 1.0 / (u * u) + 1.0 / (w * w);
            let t = beta * kind.l as f64 / k;
            let rhs = r.j * r.j * t * t * s * s;
            let lhs = (r.jd + jk) * (n1s * r.jd + n2s * jk);
            let scale = (r.jd.abs() + jk.abs()) * (n1s * r.jd.abs() + n2s * jk.abs()) + rhs;
            (lhs - rhs).abs() / scale
        }
    }
}

/// Normalized characteristic-equation residual of `kind` at propagation
/// constant `beta` (rad/m) and angular frequency `omega`.
pub fn characteristic_residual(fiber: &FiberSpec, kind: ModeKind, omega: f64, beta: f64) -> f64 {
    let k = omega / SPEED_OF_LIGHT;
    let a = fiber.radius;
    let h2 = (fiber.n1 * k - beta) * (fiber.n1 * k + beta);
    let q2 = (beta - fiber.n2 * k) * (beta + fiber.n2 * k);
    if h2 <= 0.0 || q2 <= 0.0 {
        return f64::INFINITY;
    }
    residual_uw(
        fiber,
        kind,
        k,
        Root {
            u: h2.sqrt() * a,
            w: q2.sqrt() * a,
        },
    )
}

/// All roots of one branch at frequency `omega`, in order of decreasing β.
pub(crate) fn branch_roots(
    fiber: &FiberSpec,
    family: ModeFamily,
    l: u32,
    omega: f64,
) -> Result<Vec<Root>> {
    let k = omega / SPEED_OF_LIGHT;
    let v = k * fiber.radius * fiber.numerical_aperture();
    let mut roots = Vec::new();
    if !(v > W_GUARD) {
        return Ok(roots);
    }
    let theta_max = (W_GUARD / v).acos();
    let theta_min = 1e-6 * theta_max;
    let at = |theta: f64| Root {
        u: v * theta.sin(),
        w: v * theta.cos(),
    };
    let eval = |theta: f64| branch_value(fiber, family, l, k, at(theta));

    let step = (theta_max - theta_min) / (SCAN_SAMPLES - 1) as f64;
    let mut last: Option<(f64, f64)> = None;
    for i in 0..SCAN_SAMPLES {
        let theta = if i == SCAN_SAMPLES - 1 {
            theta_max
        } else {
            theta_min + step * i as f64
        };
        let g = eval(theta)?;
        if g == 0.0 || !g.is_finite() {
            continue;
        }
        if let Some((t_prev, g_prev)) = last {
            if g.signum() != g_prev.signum() {
                let root = bisect(&eval, t_prev, theta, g_prev)?;
                let root = at(root);
                let residual = residual_uw(fiber, family_kind(family, l), k, root);
                if !(residual < MAX_RESIDUAL * (1.0 + 1.0 / (root.w * root.w))) {
                    return Err(Error::NoConvergence {
                        what: "dispersion root",
                        lower: beta_from_w(fiber, k, at(theta).w),
                        upper: beta_from_w(fiber, k, at(t_prev).w),
                        residual,
                    });
                }
                roots.push(root);
            }
        }
        last = Some((theta, g));
    }
    Ok(roots)
}

fn family_kind(family: ModeFamily, l: u32) -> ModeKind {
    ModeKind { family, l, m: 1 }
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, g_lo: f64) -> Result<f64> {
    let sign_lo = g_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = f(mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `kind` at `omega`, or `None` below cutoff.
pub(crate) fn find_root(fiber: &FiberSpec, kind: ModeKind, omega: f64) -> Result<Option<Root>> {
    if !(omega > 0.0) {
        return Err(Error::Domain("angular frequency must be positive"));
    }
    let roots = branch_roots(fiber, kind.family, kind.l, omega)?;
    Ok(roots.get(kind.m as usize - 1).copied())
}

fn beta_at(fiber: &FiberSpec, kind: ModeKind, omega: f64) -> Result<Option<f64>> {
    let k = omega / SPEED_OF_LIGHT;
    Ok(find_root(fiber, kind, omega)?.map(|r| beta_from_w(fiber, k, r.w)))
}

/// Group slowness and whether it fell back to a one-sided difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slowness {
    pub value: f64,
    pub degraded: bool,
}

/// `dβ/dω` by a centered difference with relative step 1e-6, improved by one
/// Richardson extrapolation. Near cutoff, where the mode is not guided at the
/// lower frequencies, a second-order forward difference is used instead and
/// the result is flagged as degraded.
pub fn group_slowness(mode: &GuidedMode) -> Result<Slowness> {
    slowness_at(&mode.fiber, mode.kind, mode.omega, mode.beta)
}

pub(crate) fn slowness_at(
    fiber: &FiberSpec,
    kind: ModeKind,
    omega: f64,
    beta: f64,
) -> Result<Slowness> {
    let h = SLOWNESS_STEP * omega;
    let lost = || Error::NotGuided(kind);
    let plus1 = beta_at(fiber, kind, omega + 0.5 * h)?.ok_or_else(lost)?;
    let plus2 = beta_at(fiber, kind, omega + h)?.ok_or_else(lost)?;
    let minus1 = beta_at(fiber, kind, omega - 0.5 * h)?;
    let minus2 = beta_at(fiber, kind, omega - h)?;
    if let (Some(minus1), Some(minus2)) = (minus1, minus2) {
        let coarse = (plus2 - minus2) / (2.0 * h);
        let fine = (plus1 - minus1) / h;
        Ok(Slowness {
            value: (4.0 * fine - coarse) / 3.0,
            degraded: false,
        })
    } else {
        let plus4 = beta_at(fiber, kind, omega + 2.0 * h)?.ok_or_else(lost)?;
        let fine = (-3.0 * beta + 4.0 * plus1 - plus2) / h;
        let coarse = (-3.0 * beta + 4.0 * plus2 - plus4) / (2.0 * h);
        Ok(Slowness {
            value: (4.0 * fine - coarse) / 3.0,
            degraded: true,
        })
    }
}

/// Solve for the guided mode `kind` at angular frequency `omega`.
///
/// Returns [`Error::NotGuided`] below cutoff.
pub fn solve_dispersion(fiber: &FiberSpec, kind: ModeKind, omega: f64) -> Result<GuidedMode> {
    let root = find_root(fiber, kind, omega)?.ok_or(Error::NotGuided(kind))?;
    mode_from_root(fiber, kind, omega, root)
}

fn mode_from_root(fiber: &FiberSpec, kind: ModeKind, omega: f64, root: Root) -> Result<GuidedMode> {
    let k = omega / SPEED_OF_LIGHT;
    let beta = beta_from_w(fiber, k, root.w);
    let slowness = slowness_at(fiber, kind, omega, beta)?;
    build_mode(fiber, kind, omega, beta, root, slowness)
}

/// Every guided mode at `omega`, sorted by decreasing β.
pub fn guided_modes(fiber: &FiberSpec, omega: f64) -> Result<Vec<GuidedMode>> {
    if !(omega > 0.0) {
        return Err(Error::Domain("angular frequency must be positive"));
    }
    let k = omega / SPEED_OF_LIGHT;
    let v = k * fiber.radius * fiber.numerical_aperture();
    let mut modes = Vec::new();
    let mut push_branch = |family: ModeFamily, l: u32| -> Result<()> {
        for (i, root) in branch_roots(fiber, family, l, omega)?.into_iter().enumerate() {
            let kind = ModeKind {
                family,
                l,
                m: i as u32 + 1,
            };
            modes.push(mode_from_root(fiber, kind, omega, root)?);
        }
        Ok(())
    };
    push_branch(ModeFamily::TE, 0)?;
    push_branch(ModeFamily::TM, 0)?;
    // Order-l modes have cutoffs above V ≈ l − 2, so l ≤ V + 3 is exhaustive.
    let l_max = v.ceil() as u32 + 3;
    for l in 1..=l_max {
        push_branch(ModeFamily::HE, l)?;
        push_branch(ModeFamily::EH, l)?;
    }
    modes.sort_by(|a, b| b.beta.total_cmp(&a.beta));
    Ok(modes)
}
