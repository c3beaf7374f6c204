//! The three scenarios: guided-mode listing, radial force sweep and
//! fiber-radius sweep at fixed surface distance.

use chiralforce_core::coupling::{self, total_rates_with, AtomConfig, DriveConfig, EmissionRates};
use chiralforce_core::force::{asymmetry, axial_force_with, eta_infinity, eta_infinity_bound, ForceResult};
use chiralforce_core::waveguide::{
    angular_frequency, cutoff_radius, guided_modes, solve_dispersion, Direction, FiberSpec, GuidedMode,
    ModeKind,
};
use chiralforce_core::{consts::SPEED_OF_LIGHT, Error as CoreError};
use rayon::prelude::*;

use crate::config::{Scenario, SweepSpec};
use crate::error::CliError;
use crate::table::{Cell, Table};

const NM: f64 = 1e-9;
const TWO_PI_MHZ: f64 = 2.0 * std::f64::consts::PI * 1e6;

/// Physical inputs shared by every grid point, in SI units.
#[derive(Debug, Clone, Copy)]
struct Setup {
    lambda0: f64,
    omega0: f64,
    gamma0: f64,
    detuning: f64,
    power: f64,
    orientation: f64,
}

impl Setup {
    fn new(spec: &SweepSpec) -> Self {
        let p = &spec.params;
        let lambda0 = p.wavelength_nm * NM;
        Self {
            lambda0,
            omega0: angular_frequency(lambda0),
            gamma0: p.gamma0_mhz * TWO_PI_MHZ,
            detuning: p.detuning_mhz * TWO_PI_MHZ,
            power: p.power_pw * 1e-12,
            orientation: p.pol.orientation(),
        }
    }

    fn omega_drive(&self) -> f64 {
        self.omega0 + self.detuning
    }

    fn atom(&self, spec: &SweepSpec, r: f64) -> Result<AtomConfig, CliError> {
        Ok(AtomConfig::with_linewidth(
            r,
            0.0,
            spec.params.dipole.vector(),
            self.lambda0,
            self.gamma0,
        )?)
    }

    fn drive(&self, kind: ModeKind, direction: Direction) -> Result<DriveConfig, CliError> {
        Ok(DriveConfig::new(kind, self.orientation, direction, self.power, self.detuning)?)
    }
}

/// Forces for both drive directions and their asymmetry.
#[derive(Debug, Clone, Copy)]
pub struct ForcePair {
    pub plus: ForceResult,
    pub minus: ForceResult,
    /// `None` when both forces vanish.
    pub eta: Option<f64>,
}

fn force_pair(
    setup: &Setup,
    atom: &AtomConfig,
    mode: &GuidedMode,
    rates: &EmissionRates,
) -> Result<ForcePair, CliError> {
    let plus = axial_force_with(atom, &setup.drive(mode.kind, Direction::Forward)?, mode, rates)?;
    let minus = axial_force_with(atom, &setup.drive(mode.kind, Direction::Backward)?, mode, rates)?;
    let eta = match asymmetry(plus.f_z, minus.f_z) {
        Ok(e) => Some(e),
        Err(CoreError::UndefinedAsymmetry) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(ForcePair { plus, minus, eta })
}

/// Run `f` on a pool capped by `CHIRALFORCE_THREADS` when set.
fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match std::env::var("CHIRALFORCE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::usage(format!("CHIRALFORCE_THREADS must be a positive integer, got {v:?}")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn fiber_of(spec: &SweepSpec, radius_nm: f64) -> Result<FiberSpec, CliError> {
    Ok(FiberSpec::new(radius_nm * NM, spec.params.n1, spec.params.n2)?)
}

fn common_metadata(t: &mut Table, spec: &SweepSpec, setup: &Setup) {
    let p = &spec.params;
    t.meta("tool", "chiralforce");
    t.meta("version", env!("CARGO_PKG_VERSION"));
    t.meta("scenario", spec.scenario.name());
    t.meta_float("wavelength_nm", p.wavelength_nm);
    t.meta_float("n1", p.n1);
    t.meta_float("n2", p.n2);
    if spec.scenario != Scenario::Radius {
        t.meta_float("radius_nm", p.radius_nm);
    }
    if spec.scenario == Scenario::Modes {
        return;
    }
    let modes: Vec<String> = p.modes.iter().map(ToString::to_string).collect();
    t.meta("modes", modes.join(" "));
    t.meta("pol", p.pol);
    t.meta("dipole", p.dipole);
    t.meta_float("power_pW", p.power_pw);
    t.meta_float("detuning_MHz", p.detuning_mhz);
    t.meta_float("gamma0_MHz", p.gamma0_mhz);
    t.meta_float("gamma0_rad_s", setup.gamma0);
    t.meta_float("omega0_rad_s", setup.omega0);
    t.meta_float(
        "dipole_moment_C_m",
        coupling::dipole_from_linewidth(setup.gamma0, setup.omega0),
    );
    if let Some(g) = spec.grid {
        t.meta_float("grid_min_nm", g.min);
        t.meta_float("grid_max_nm", g.max);
        t.meta("grid_points", g.count);
    }
    if spec.scenario == Scenario::Radius {
        t.meta_float("distance_nm", p.distance_nm);
    }
    t.meta_float("eta_infinity_bound", eta_infinity_bound(p.n1, p.n2));
    t.meta("l_max_start", coupling::L_MAX_START);
    t.meta("beta_panels_start", coupling::BETA_PANELS_START);
    t.meta_float("rate_tolerance", coupling::RATE_TOLERANCE);
}

fn quadrature_metadata<'a>(t: &mut Table, rates: impl Iterator<Item = &'a EmissionRates>) {
    let (mut l, mut n) = (0, 0);
    for r in rates {
        l = l.max(r.radiation.l_max);
        n = n.max(r.radiation.beta_nodes);
    }
    t.meta("l_max", l);
    t.meta("beta_nodes", n);
}

fn cutoff_nm(kind: ModeKind, lambda: f64, n1: f64, n2: f64) -> Result<Option<f64>, CliError> {
    if kind == ModeKind::HE11 || n1 <= n2 {
        return Ok(None);
    }
    Ok(Some(cutoff_radius(kind, lambda, n1, n2)? / NM))
}

pub fn run(spec: &SweepSpec) -> Result<Table, CliError> {
    match spec.scenario {
        Scenario::Modes => list_modes(spec),
        Scenario::Radial => run_radial_sweep(spec),
        Scenario::Radius => run_radius_sweep(spec),
    }
}

/// Guided modes at the transition wavelength with β, β/k, q, β′ and cutoff.
pub fn list_modes(spec: &SweepSpec) -> Result<Table, CliError> {
    let setup = Setup::new(spec);
    let p = &spec.params;
    let fiber = fiber_of(spec, p.radius_nm)?;
    let modes = guided_modes(&fiber, setup.omega0)?;
    let mut t = Table::default();
    common_metadata(&mut t, spec, &setup);
    t.meta_float("v_number", chiralforce_core::waveguide::v_number(&fiber, setup.lambda0));
    t.meta("guided_count", modes.len());
    t.columns = ["mode", "beta_rad_per_m", "neff", "q_rad_per_m", "beta_prime_s_per_m", "group_index", "cutoff_radius_nm"]
        .map(String::from)
        .to_vec();
    for m in &modes {
        t.rows.push(vec![
            Cell::Text(m.kind.to_string()),
            m.beta.into(),
            m.effective_index().into(),
            m.q.into(),
            m.beta_prime.into(),
            (m.beta_prime * SPEED_OF_LIGHT).into(),
            cutoff_nm(m.kind, setup.lambda0, p.n1, p.n2)?.into(),
        ]);
    }
    Ok(t)
}

/// Forces versus atom position for each requested drive mode.
pub fn run_radial_sweep(spec: &SweepSpec) -> Result<Table, CliError> {
    let setup = Setup::new(spec);
    let p = &spec.params;
    let grid = spec.grid.ok_or_else(|| CliError::usage("radial sweep needs a grid"))?;
    let fiber = fiber_of(spec, p.radius_nm)?;
    if grid.min * NM <= fiber.radius {
        return Err(CoreError::Domain("atom must be outside the fiber: radial sweep must start at r > a").into());
    }
    let drive_modes: Vec<GuidedMode> = p
        .modes
        .iter()
        .map(|&k| solve_dispersion(&fiber, k, setup.omega_drive()))
        .collect::<Result<_, _>>()?;
    let emission_modes = guided_modes(&fiber, setup.omega0)?;
    let rs = grid.points();

    let rates: Vec<EmissionRates> = in_pool(|| {
        rs.par_iter()
            .map(|&r| {
                let atom = setup.atom(spec, r * NM)?;
                Ok(total_rates_with(&atom, &fiber, &emission_modes)?)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;

    let mut t = Table::default();
    common_metadata(&mut t, spec, &setup);
    quadrature_metadata(&mut t, rates.iter());
    for m in &drive_modes {
        t.meta_float(format!("beta_L_{}_rad_per_m", m.kind), m.beta);
        t.meta_float(format!("q_L_{}_rad_per_m", m.kind), m.q);
        t.meta_float(format!("eta_infinity_{}", m.kind), eta_infinity(m.beta, m.q)?);
    }
    t.columns = [
        "mode", "r_nm", "abs_F_plus_N", "abs_F_minus_N", "eta", "rho_ee_plus", "rho_ee_minus",
        "Gamma_rad_s", "gamma_g_rad_s", "gamma_r_rad_s",
    ]
    .map(String::from)
    .to_vec();
    for mode in &drive_modes {
        for (&r, g) in rs.iter().zip(&rates) {
            let atom = setup.atom(spec, r * NM)?;
            let pair = force_pair(&setup, &atom, mode, g)?;
            t.rows.push(vec![
                Cell::Text(mode.kind.to_string()),
                r.into(),
                pair.plus.f_z.abs().into(),
                pair.minus.f_z.abs().into(),
                pair.eta.into(),
                pair.plus.rho_ee.into(),
                pair.minus.rho_ee.into(),
                g.gamma_total.into(),
                g.gamma_g.into(),
                g.gamma_r().into(),
            ]);
        }
    }
    Ok(t)
}

struct RadiusPoint {
    rates: EmissionRates,
    pairs: Vec<Option<ForcePair>>,
}

/// Forces versus fiber radius at a fixed atom–surface distance. Modes below
/// cutoff give absent entries.
pub fn run_radius_sweep(spec: &SweepSpec) -> Result<Table, CliError> {
    let setup = Setup::new(spec);
    let p = &spec.params;
    let grid = spec.grid.ok_or_else(|| CliError::usage("radius sweep needs a grid"))?;
    if !(grid.min > 0.0) {
        return Err(CoreError::Domain("fiber radius must be positive").into());
    }
    if !(p.distance_nm > 0.0) {
        return Err(CoreError::Domain("atom must be outside the fiber: distance must be positive").into());
    }
    let radii = grid.points();

    let points: Vec<RadiusPoint> = in_pool(|| {
        radii
            .par_iter()
            .map(|&a| {
                let fiber = fiber_of(spec, a)?;
                let atom = setup.atom(spec, (a + p.distance_nm) * NM)?;
                let emission_modes = guided_modes(&fiber, setup.omega0)?;
                let rates = total_rates_with(&atom, &fiber, &emission_modes)?;
                let pairs = p
                    .modes
                    .iter()
                    .map(|&k| match solve_dispersion(&fiber, k, setup.omega_drive()) {
                        Ok(mode) => force_pair(&setup, &atom, &mode, &rates).map(Some),
                        Err(CoreError::NotGuided(_)) => Ok(None),
                        Err(e) => Err(e.into()),
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(RadiusPoint { rates, pairs })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })??;

    let mut t = Table::default();
    common_metadata(&mut t, spec, &setup);
    quadrature_metadata(&mut t, points.iter().map(|pt| &pt.rates));
    let lambda_drive = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / setup.omega_drive();
    for &k in &p.modes {
        match cutoff_nm(k, lambda_drive, p.n1, p.n2)? {
            Some(c) => t.meta_float(format!("cutoff_{k}_nm"), c),
            None => t.meta(format!("cutoff_{k}_nm"), "none"),
        }
    }
    t.columns = ["a_nm", "r_nm", "Gamma_rad_s", "gamma_g_rad_s", "gamma_r_rad_s"]
        .map(String::from)
        .to_vec();
    for k in &p.modes {
        for col in ["abs_F_plus_N", "abs_F_minus_N", "eta"] {
            t.columns.push(format!("{k}_{col}"));
        }
    }
    for (&a, pt) in radii.iter().zip(&points) {
        let mut row: Vec<Cell> = vec![
            a.into(),
            (a + p.distance_nm).into(),
            pt.rates.gamma_total.into(),
            pt.rates.gamma_g.into(),
            pt.rates.gamma_r().into(),
        ];
        for pair in &pt.pairs {
            match pair {
                Some(fp) => {
                    row.push(fp.plus.f_z.abs().into());
                    row.push(fp.minus.f_z.abs().into());
                    row.push(fp.eta.into());
                }
                None => row.extend([Cell::Missing, Cell::Missing, Cell::Missing]),
            }
        }
        t.rows.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;

    fn spec(scenario: Scenario, o: Overrides) -> SweepSpec {
        SweepSpec::resolve(scenario, o).unwrap()
    }

    #[test]
    fn mode_list_at_350_nm() {
        let t = list_modes(&spec(Scenario::Modes, Overrides::default())).unwrap();
        let names: Vec<String> = t
            .rows
            .iter()
            .map(|r| match &r[0] {
                Cell::Text(s) => s.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(names, ["HE11", "TE01", "TM01", "HE21"]);
        assert_eq!(t.rows[0][6], Cell::Missing);
    }

    #[test]
    fn thin_and_bare_fibers() {
        let thin = Overrides {
            radius_nm: Some(200.0),
            ..Default::default()
        };
        assert_eq!(list_modes(&spec(Scenario::Modes, thin)).unwrap().rows.len(), 1);
        let bare = Overrides {
            n1: Some(1.0),
            ..Default::default()
        };
        assert!(list_modes(&spec(Scenario::Modes, bare)).unwrap().rows.is_empty());
    }

    #[test]
    fn radial_sweep_rejects_atom_inside_and_unguided_mode() {
        let inside = Overrides {
            rmin_nm: Some(340.0),
            points: Some(2),
            ..Default::default()
        };
        let err = run_radial_sweep(&spec(Scenario::Radial, inside)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let thin = Overrides {
            radius_nm: Some(200.0),
            modes: Some(vec![ModeKind::TM01]),
            points: Some(2),
            ..Default::default()
        };
        let err = run_radial_sweep(&spec(Scenario::Radial, thin)).unwrap_err();
        assert!(matches!(err, CliError::Core(CoreError::NotGuided(_))));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn small_radial_sweep_layout() {
        let o = Overrides {
            modes: Some(vec![ModeKind::HE11, ModeKind::TE01]),
            rmin_nm: Some(370.0),
            rmax_nm: Some(400.0),
            points: Some(2),
            ..Default::default()
        };
        let t = run_radial_sweep(&spec(Scenario::Radial, o)).unwrap();
        assert_eq!(t.rows.len(), 4);
        let eta = t.column("eta").unwrap();
        assert!(matches!(t.rows[0][eta], Cell::Num(x) if x > 0.9));
        assert_eq!(t.rows[2][eta], Cell::Missing);
        assert!(t.meta_value("l_max").is_some());
        assert!(t.meta_value("beta_nodes").is_some());
        assert_eq!(t.meta_value("version"), Some(env!("CARGO_PKG_VERSION")));
    }

    #[test]
    fn radius_sweep_marks_below_cutoff() {
        let o = Overrides {
            modes: Some(vec![ModeKind::HE11, ModeKind::TM01]),
            rmin_nm: Some(270.0),
            rmax_nm: Some(300.0),
            points: Some(2),
            ..Default::default()
        };
        let t = run_radius_sweep(&spec(Scenario::Radius, o)).unwrap();
        let he = t.column("HE11_eta").unwrap();
        let tm = t.column("TM01_eta").unwrap();
        assert!(matches!(t.rows[0][he], Cell::Num(_)));
        assert_eq!(t.rows[0][tm], Cell::Missing);
        assert!(matches!(t.rows[1][tm], Cell::Num(_)));
        let c: f64 = t.meta_value("cutoff_TM01_nm").unwrap().parse().unwrap();
        assert!((c - 282.96).abs() < 0.1);
        assert_eq!(t.meta_value("cutoff_HE11_nm"), Some("none"));
    }
}
