//! Cylinder functions of integer order.
//!
//! `J` and `Y` are evaluated with the fdlibm-derived routines of the `libm`
//! crate (rational approximations near the origin, Hankel asymptotics for
//! large arguments, recurrence in the stable direction). `I` is summed from
//! its power series, switching to the large-argument expansion of the scaled
//! function once `x` exceeds the square of the order. `K` comes from the
//! integral `K_ν(x) = ∫₀^∞ exp(-x cosh t) cosh(νt) dt` evaluated with the
//! trapezoidal rule (geometrically convergent for this analytic integrand)
//! for ν = 0, 1 and forward recurrence above that.
//!
//! Derivatives use the standard three-term relations.


#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};

/// Which cylinder function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    I,
    K,
}

/// A cylinder function value together with its derivative in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylEval {
    pub value: f64,
    pub derivative: f64,
}

impl CylEval {
    pub const ZERO: CylEval = CylEval {
        value: 0.0,
        derivative: 0.0,
    };
}

/// Evaluate `Z_l(x)` and `Z_l'(x)` for `Z ∈ {J, Y, I, K}`.
///
/// `I` reports [`Error::Overflow`] instead of returning infinity; `K`
/// underflows to zero for `x` beyond roughly 700 (use
/// [`cyl_bessel_scaled`] there).
pub fn cyl_bessel(kind: BesselKind, l: u32, x: f64) -> Result<CylEval> {
    check_argument(x)?;
    let eval = match kind {
        BesselKind::J => eval_j(l, x),
        BesselKind::Y => eval_y(l, x),
        BesselKind::I => {
            if x > 700.0 {
                return Err(Error::Overflow("I_l(x) exceeds f64 range"));
            }
            let s = eval_i_scaled(l, x);
            let e = x.exp();
            CylEval {
                value: s.value * e,
                derivative: s.derivative * e,
            }
        }
        BesselKind::K => {
            let s = eval_k_scaled(l, x);
            let e = (-x).exp();
            CylEval {
                value: s.value * e,
                derivative: s.derivative * e,
            }
        }
    };
    if !(eval.value.is_finite() && eval.derivative.is_finite()) {
        return Err(Error::Overflow("cylinder function not representable"));
    }
    Ok(eval)
}

/// Exponentially scaled evaluation: `e^{-x} I_l(x)` and `e^{x} K_l(x)` (the
/// derivative is that of the unscaled function, scaled by the same factor).
/// `J` and `Y` are returned unscaled.
pub fn cyl_bessel_scaled(kind: BesselKind, l: u32, x: f64) -> Result<CylEval> {
    check_argument(x)?;
    let eval = match kind {
        BesselKind::J => eval_j(l, x),
        BesselKind::Y => eval_y(l, x),
        BesselKind::I => eval_i_scaled(l, x),
        BesselKind::K => eval_k_scaled(l, x),
    };
    if !(eval.value.is_finite() && eval.derivative.is_finite()) {
        return Err(Error::Overflow("cylinder function not representable"));
    }
    Ok(eval)
}

fn check_argument(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("cylinder functions require finite x > 0"))
    }
}

fn eval_j(l: u32, x: f64) -> CylEval {
    let n = l as i32;
    let value = libm::jn(n, x);
    let derivative = if l == 0 {
        -libm::j1(x)
    } else {
        0.5 * (libm::jn(n - 1, x) - libm::jn(n + 1, x))
    };
    CylEval { value, derivative }
}

fn eval_y(l: u32, x: f64) -> CylEval {
    let n = l as i32;
    let value = libm::yn(n, x);
    let derivative = if l == 0 {
        -libm::y1(x)
    } else {
        0.5 * (libm::yn(n - 1, x) - libm::yn(n + 1, x))
    };
    CylEval { value, derivative }
}

/// `e^{-x} I_ν(x)` for integer ν ≥ 0.
fn i_scaled(nu: u32, x: f64) -> f64 {
    let nu_f = nu as f64;
    if x > 30.0_f64.max(nu_f * nu_f) {
        // Large-argument expansion; terms shrink monotonically in this regime.
        let mu = 4.0 * nu_f * nu_f;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            term *= -(mu - odd * odd) / (kf * 8.0 * x);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum / (2.0 * core::f64::consts::PI * x).sqrt()
    } else {
        let half = 0.5 * x;
        let log_lead = nu_f * half.ln() - libm::lgamma(nu_f + 1.0) - x;
        let mut term = log_lead.exp();
        let mut sum = term;
        let q = half * half;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + nu_f));
            sum += term;
            if term < 1e-17 * sum && k > half {
                break;
            }
            if k > 10_000.0 {
                break;
            }
        }
        sum
    }
}

fn eval_i_scaled(l: u32, x: f64) -> CylEval {
    let value = i_scaled(l, x);
    let derivative = if l == 0 {
        i_scaled(1, x)
    } else {
        0.5 * (i_scaled(l - 1, x) + i_scaled(l + 1, x))
    };
    CylEval { value, derivative }
}

/// `e^{x} K_ν(x)` for ν ∈ {0, 1} via trapezoidal quadrature of the
/// integral representation, written with `cosh t - 1 = 2 sinh²(t/2)`.
fn k_scaled_integral(nu: f64, x: f64) -> f64 {
    let h = 0.1_f64.min(0.5 / x.sqrt());
    let peak = (nu / x).asinh();
    let f = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (nu * t).cosh()
    };
    let mut sum = 0.5 * f(0.0);
    let mut k = 1.0;
    loop {
        let t = k * h;
        let term = f(t);
        sum += term;
        if t > peak && term < 1e-18 * sum {
            break;
        }
        k += 1.0;
    }
    sum * h
}

/// Scaled `K_0 … K_{n}` by forward recurrence (stable upward for K).
fn k_scaled_orders(n: u32, x: f64) -> [f64; 3] {
    // Returns [K_{n-1}, K_n, K_{n+1}] scaled, with K_{-1} = K_1.
    let k0 = k_scaled_integral(0.0, x);
    let k1 = k_scaled_integral(1.0, x);
    if n == 0 {
        return [k1, k0, k1];
    }
    let (mut prev, mut cur) = (k0, k1);
    for m in 1..=n {
        let next = prev + 2.0 * m as f64 / x * cur;
        if m == n {
            return [prev, cur, next];
        }
        prev = cur;
        cur = next;
    }
    unreachable!()
}

fn eval_k_scaled(l: u32, x: f64) -> CylEval {
    let [below, value, above] = k_scaled_orders(l, x);
    CylEval {
        value,
        derivative: -0.5 * (below + above),
    }
}

/// The `m`-th positive zero of `J_l` (1-based).
///
/// Zeros are bracketed by sampling at π/4 spacing from `x = l` (there are no
/// zeros of `J_l` in `(0, l]`), refined by bisection to 1e-13 relative width
/// and polished with one secant step.
pub fn bessel_j_zero(l: u32, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("zero index m is 1-based"));
    }
    let n = l as i32;
    let j = |x: f64| libm::jn(n, x);
    let step = core::f64::consts::FRAC_PI_4;
    let mut lo = (l as f64).max(1e-3);
    let mut f_lo = j(lo);
    let mut found = 0;
    loop {
        let hi = lo + step;
        let f_hi = j(hi);
        if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
            found += 1;
            if found == m {
                return Ok(refine_zero(j, lo, hi, f_lo));
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
}

fn refine_zero(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    if f_lo == 0.0 {
        return lo;
    }
    let mut f_hi = f(hi);
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if secant > lo && secant < hi {
        secant
    } else {
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Power series of J_0, independent of libm; accurate for x ≲ 8.
    fn j0_series(x: f64) -> f64 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= q / ((k * k) as f64);
            sum += term;
        }
        sum
    }

    fn j1_series(x: f64) -> f64 {
        let q = -0.25 * x * x;
        let mut term = 0.5 * x;
        let mut sum = term;
        for k in 1..60 {
            term *= q / ((k * (k + 1)) as f64);
            sum += term;
        }
        sum
    }

    fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut f_lo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let fm = f(mid);
            if (fm < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn j_near_origin() {
        let j0 = cyl_bessel(BesselKind::J, 0, 1e-12).unwrap();
        assert!((j0.value - 1.0).abs() < 1e-15);
        assert!(j0.derivative.abs() < 1e-11);
        let j1 = cyl_bessel(BesselKind::J, 1, 1e-12).unwrap();
        assert!(j1.value.abs() < 1e-11);
    }

    #[test]
    fn wronskian_jy_at_one() {
        let j = cyl_bessel(BesselKind::J, 0, 1.0).unwrap();
        let y = cyl_bessel(BesselKind::Y, 0, 1.0).unwrap();
        let w = j.value * y.derivative - j.derivative * y.value;
        assert!(rel(w, 2.0 / PI) < 1e-12, "{w}");
    }

    #[test]
    fn wronskian_ik_order_two_at_three() {
        let i = cyl_bessel(BesselKind::I, 2, 3.0).unwrap();
        let k = cyl_bessel(BesselKind::K, 2, 3.0).unwrap();
        let w = i.value * k.derivative - i.derivative * k.value;
        assert!(rel(w, -1.0 / 3.0) < 1e-12, "{w}");
    }

    #[test]
    fn wronskian_grid() {
        for &x in &[0.5, 1.0, 5.0, 20.0] {
            for l in 0..=5 {
                let j = cyl_bessel(BesselKind::J, l, x).unwrap();
                let y = cyl_bessel(BesselKind::Y, l, x).unwrap();
                let wjy = j.value * y.derivative - j.derivative * y.value;
                assert!(rel(wjy, 2.0 / (PI * x)) < 1e-10, "JY l={l} x={x}: {wjy}");
                let i = cyl_bessel(BesselKind::I, l, x).unwrap();
                let k = cyl_bessel(BesselKind::K, l, x).unwrap();
                let wik = i.value * k.derivative - i.derivative * k.value;
                assert!(rel(wik, -1.0 / x) < 1e-10, "IK l={l} x={x}: {wik}");
            }
        }
    }

    #[test]
    fn scaled_wronskian_extreme_arguments() {
        for &x in &[1e-3, 0.05, 33.0, 150.0, 999.0] {
            for l in [0u32, 1, 3, 12, 20] {
                let i = cyl_bessel_scaled(BesselKind::I, l, x).unwrap();
                let k = cyl_bessel_scaled(BesselKind::K, l, x).unwrap();
                let w = i.value * k.derivative - i.derivative * k.value;
                assert!(rel(w, -1.0 / x) < 1e-10, "l={l} x={x}: {w}");
            }
        }
    }

    #[test]
    fn recurrence_and_derivative_identity() {
        for &x in &[0.3, 2.0, 7.5, 40.0] {
            for l in 1..=8u32 {
                let jm = cyl_bessel(BesselKind::J, l - 1, x).unwrap().value;
                let j = cyl_bessel(BesselKind::J, l, x).unwrap();
                let jp = cyl_bessel(BesselKind::J, l + 1, x).unwrap().value;
                let lhs = jm + jp;
                let rhs = 2.0 * l as f64 / x * j.value;
                assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1e-300), "l={l} x={x}");
                let d = 0.5 * (jm - jp);
                assert!((d - j.derivative).abs() <= 1e-9 * d.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        for kind in [BesselKind::J, BesselKind::Y, BesselKind::I, BesselKind::K] {
            for l in [0u32, 1, 4] {
                let mut x = 0.1;
                while x <= 50.0 {
                    let e = cyl_bessel(kind, l, x).unwrap();
                    let h = 1e-5 * x;
                    let fd = (cyl_bessel(kind, l, x + h).unwrap().value
                        - cyl_bessel(kind, l, x - h).unwrap().value)
                        / (2.0 * h);
                    let scale = e.derivative.abs().max(e.value.abs());
                    assert!(
                        (fd - e.derivative).abs() <= 1e-6 * scale,
                        "{kind:?} l={l} x={x}: {fd} vs {}",
                        e.derivative
                    );
                    x *= 1.7;
                }
            }
        }
    }

    #[test]
    fn k_positive_and_decreasing() {
        for l in 0..=6u32 {
            let mut prev = f64::INFINITY;
            let mut x = 1e-3;
            while x < 600.0 {
                let k = cyl_bessel(BesselKind::K, l, x).unwrap();
                assert!(k.value > 0.0 && k.value < prev, "l={l} x={x}");
                assert!(k.derivative < 0.0);
                prev = k.value;
                x *= 1.3;
            }
        }
    }

    #[test]
    fn k_reference_values() {
        // K_0 against a high-accuracy reference: K_0(1) = 0.42102443824070833.
        let k0 = cyl_bessel(BesselKind::K, 0, 1.0).unwrap().value;
        assert!(rel(k0, 0.421_024_438_240_708_33) < 1e-14);
        // K_1(2) = 0.13986588181652243
        let k1 = cyl_bessel(BesselKind::K, 1, 2.0).unwrap().value;
        assert!(rel(k1, 0.139_865_881_816_522_43) < 1e-14);
    }

    #[test]
    fn i_overflow_is_reported() {
        assert!(matches!(
            cyl_bessel(BesselKind::I, 0, 800.0),
            Err(Error::Overflow(_))
        ));
        assert!(cyl_bessel_scaled(BesselKind::I, 0, 800.0).is_ok());
    }

    #[test]
    fn nonpositive_argument_rejected() {
        for kind in [BesselKind::J, BesselKind::Y, BesselKind::I, BesselKind::K] {
            assert!(matches!(cyl_bessel(kind, 0, 0.0), Err(Error::Domain(_))));
            assert!(matches!(cyl_bessel(kind, 1, -2.0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn j_zeros_match_bisection_oracle() {
        let z01 = bisect_oracle(j0_series, 2.0, 3.0);
        let z11 = bisect_oracle(j1_series, 3.0, 4.0);
        let z02 = bisect_oracle(j0_series, 5.0, 6.0);
        assert!(rel(z01, 2.404_825_557_695_773) < 1e-14);
        assert!(rel(z11, 3.831_705_970_207_512) < 1e-14);
        assert!(rel(z02, 5.520_078_110_286_311) < 1e-14);
        assert!(rel(bessel_j_zero(0, 1).unwrap(), z01) < 1e-12);
        assert!(rel(bessel_j_zero(1, 1).unwrap(), z11) < 1e-12);
        assert!(rel(bessel_j_zero(0, 2).unwrap(), z02) < 1e-12);
    }

    #[test]
    fn j_zeros_are_roots() {
        for l in 0..=10 {
            for m in 1..=5 {
                let z = bessel_j_zero(l, m).unwrap();
                assert!(libm::jn(l as i32, z).abs() < 1e-10, "l={l} m={m}");
            }
        }
        assert!(bessel_j_zero(0, 0).is_err());
    }
}
