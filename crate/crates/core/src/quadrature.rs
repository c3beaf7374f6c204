//! Gauss–Legendre rules, composite integration on panels, and adaptive
//! Gauss–Kronrod integration of vector-valued integrands.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Sum of the rule applied on each consecutive pair of `breaks`.
    pub fn integrate_panels(&self, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        breaks
            .windows(2)
            .map(|p| self.integrate(p[0], p[1], &mut f))
            .sum()
    }
}

/// Non-negative Kronrod abscissae of the 15-point rule; odd indices are the
/// 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Weights of the embedded 7-point Gauss rule at `XGK[1]`, `XGK[3]`, `XGK[5]`, `XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod value and `|K15 − G7|` of `f` on `[a, b]`.
fn kronrod_panel<const N: usize>(
    a: f64,
    b: f64,
    f: &mut impl FnMut(f64) -> Result<[f64; N]>,
) -> Result<([f64; N], [f64; N])> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for (j, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate() {
        let points: &[f64] = if x == 0.0 { &[mid] } else { &[mid - half * x, mid + half * x] };
        for &t in points {
            let v = f(t)?;
            for c in 0..N {
                kron[c] += wk * v[c];
                if j % 2 == 1 {
                    gauss[c] += WG[j / 2] * v[c];
                }
            }
        }
    }
    let mut err = [0.0; N];
    for c in 0..N {
        kron[c] *= half;
        gauss[c] *= half;
        err[c] = (kron[c] - gauss[c]).abs();
    }
    Ok((kron, err))
}

/// Result of [`adaptive_kronrod`].
#[derive(Debug, Clone, PartialEq)]
pub struct Adaptive<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub panels: usize,
    pub evaluations: usize,
}

/// Integrate `f` over the consecutive panels of `breaks`, repeatedly
/// bisecting the panel with the largest `rank(error)` until
/// `accept(value, error)` holds for the totals.
pub fn adaptive_kronrod<const N: usize>(
    breaks: &[f64],
    max_panels: usize,
    mut f: impl FnMut(f64) -> Result<[f64; N]>,
    mut accept: impl FnMut(&[f64; N], &[f64; N]) -> bool,
    mut rank: impl FnMut(&[f64; N]) -> f64,
) -> Result<Adaptive<N>> {
    if breaks.len() < 2 {
        return Err(Error::Domain("adaptive quadrature needs at least one panel"));
    }
    let mut panels = Vec::with_capacity(breaks.len() - 1);
    for p in breaks.windows(2) {
        let (v, e) = kronrod_panel(p[0], p[1], &mut f)?;
        panels.push((p[0], p[1], v, e));
    }
    let mut evaluations = 15 * panels.len();
    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for (_, _, v, e) in &panels {
            for c in 0..N {
                value[c] += v[c];
                error[c] += e[c];
            }
        }
        if accept(&value, &error) {
            return Ok(Adaptive {
                value,
                error,
                panels: panels.len(),
                evaluations,
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::NoConvergence {
                what: "adaptive Gauss-Kronrod quadrature",
                lower: breaks[0],
                upper: breaks[breaks.len() - 1],
                residual: rank(&error),
            });
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| rank(&panels[i].3).total_cmp(&rank(&panels[j].3)))
            .unwrap_or(0);
        let (a, b, _, _) = panels[worst];
        let m = 0.5 * (a + b);
        let left = kronrod_panel(a, m, &mut f)?;
        let right = kronrod_panel(m, b, &mut f)?;
        evaluations += 30;
        panels[worst] = (a, m, left.0, left.1);
        panels.insert(worst + 1, (m, b, right.0, right.1));
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 32, 64, 257, 1024] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(6);
        for deg in 0..12 {
            let got = g.integrate(0.0, 1.0, |x| x.powi(deg));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "deg={deg}");
        }
    }

    #[test]
    fn nodes_are_symmetric() {
        let g = GaussLegendre::new(64);
        for i in 0..64 {
            assert_eq!(g.nodes[i], -g.nodes[63 - i]);
            assert_eq!(g.weights[i], g.weights[63 - i]);
        }
    }

    #[test]
    fn kronrod_is_exact_for_degree_22() {
        let mut f = |x: f64| -> Result<[f64; 1]> { Ok([x.powi(22)]) };
        let (v, _) = kronrod_panel(0.0, 1.0, &mut f).unwrap();
        assert!((v[0] - 1.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_resolves_narrow_lorentzian() {
        // ∫₀¹ ε/((x − x₀)² + ε²) dx = atan((1 − x₀)/ε) + atan(x₀/ε)
        let (x0, eps) = (0.3137, 1e-5);
        let want = ((1.0 - x0) / eps).atan() + (x0 / eps).atan();
        let breaks: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let r = adaptive_kronrod(
            &breaks,
            10_000,
            |x| Ok([eps / ((x - x0) * (x - x0) + eps * eps), 1.0]),
            |v, e| e[0] <= 1e-10 * v[0],
            |e| e[0],
        )
        .unwrap();
        assert!((r.value[0] - want).abs() < 1e-9 * want, "{} {}", r.value[0], want);
        assert!((r.value[1] - 1.0).abs() < 1e-14);
        assert_eq!(r.evaluations, 15 * (2 * r.panels - 16));
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let r = adaptive_kronrod(&[0.0, 1.0], 4, |x| Ok([1.0 / x.sqrt()]), |_, e| e[0] < 1e-300, |e| e[0]);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn smooth_transcendental() {
        let g = GaussLegendre::new(32);
        let got = g.integrate_panels(&[0.0, 1.0, 2.0, 3.0], |x| (-x).exp());
        assert!((got - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
    }
}
