//! Run parameters: built-in defaults, overlaid by a flat `key = value`
//! config file, overlaid by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chiralforce_core::{Dipole, ModeKind};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Modes,
    Radial,
    Radius,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Modes => "modes",
            Scenario::Radial => "radial-sweep",
            Scenario::Radius => "radius-sweep",
        }
    }
}

/// Drive polarization axis for hybrid modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pol {
    X,
    Y,
}

impl Pol {
    pub fn orientation(self) -> f64 {
        match self {
            Pol::X => 0.0,
            Pol::Y => std::f64::consts::FRAC_PI_2,
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::X => "x",
            Pol::Y => "y",
        })
    }
}

impl FromStr for Pol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Pol::X),
            "y" => Ok(Pol::Y),
            _ => Err(format!("polarization must be x or y, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("format must be csv or json, got {s:?}")),
        }
    }
}

pub fn parse_modes(s: &str) -> Result<Vec<ModeKind>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<ModeKind>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

pub fn parse_dipole(s: &str) -> Result<Dipole, String> {
    s.parse::<Dipole>().map_err(|e| e.to_string())
}

/// Any subset of the parameters; unset fields fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub radius_nm: Option<f64>,
    pub wavelength_nm: Option<f64>,
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub modes: Option<Vec<ModeKind>>,
    pub pol: Option<Pol>,
    pub power_pw: Option<f64>,
    pub detuning_mhz: Option<f64>,
    pub gamma0_mhz: Option<f64>,
    pub dipole: Option<Dipole>,
    pub rmin_nm: Option<f64>,
    pub rmax_nm: Option<f64>,
    pub points: Option<usize>,
    pub distance_nm: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Overrides {
    /// Fields set in `upper` win.
    pub fn overlay(self, upper: Overrides) -> Overrides {
        Overrides {
            radius_nm: upper.radius_nm.or(self.radius_nm),
            wavelength_nm: upper.wavelength_nm.or(self.wavelength_nm),
            n1: upper.n1.or(self.n1),
            n2: upper.n2.or(self.n2),
            modes: upper.modes.or(self.modes),
            pol: upper.pol.or(self.pol),
            power_pw: upper.power_pw.or(self.power_pw),
            detuning_mhz: upper.detuning_mhz.or(self.detuning_mhz),
            gamma0_mhz: upper.gamma0_mhz.or(self.gamma0_mhz),
            dipole: upper.dipole.or(self.dipole),
            rmin_nm: upper.rmin_nm.or(self.rmin_nm),
            rmax_nm: upper.rmax_nm.or(self.rmax_nm),
            points: upper.points.or(self.points),
            distance_nm: upper.distance_nm.or(self.distance_nm),
            out: upper.out.or(self.out),
            format: upper.format.or(self.format),
        }
    }

    /// Parse a flat config file. Keys are the long flag names; `_` and `-`
    /// are interchangeable and case is ignored. `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::usage(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let key = key.trim().to_ascii_lowercase().replace('_', "-");
            let value = value.trim();
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("{key}: not a number: {v:?}")));
            match key.as_str() {
                "radius-nm" => o.radius_nm = Some(num(value)?),
                "wavelength-nm" => o.wavelength_nm = Some(num(value)?),
                "n1" => o.n1 = Some(num(value)?),
                "n2" => o.n2 = Some(num(value)?),
                "mode" | "modes" => o.modes = Some(parse_modes(value).map_err(bad)?),
                "pol" => o.pol = Some(value.parse().map_err(bad)?),
                "power-pw" => o.power_pw = Some(num(value)?),
                "detuning-mhz" => o.detuning_mhz = Some(num(value)?),
                "gamma0-mhz" => o.gamma0_mhz = Some(num(value)?),
                "dipole" => o.dipole = Some(parse_dipole(value).map_err(bad)?),
                "rmin-nm" => o.rmin_nm = Some(num(value)?),
                "rmax-nm" => o.rmax_nm = Some(num(value)?),
                "points" => {
                    o.points = Some(value.parse().map_err(|_| bad(format!("points: not a count: {value:?}")))?)
                }
                "distance-nm" => o.distance_nm = Some(num(value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => o.format = Some(value.parse().map_err(bad)?),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(o)
    }

    pub fn from_config_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_config_str(&text)
    }
}

/// Evenly spaced grid including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, CliError> {
        if count < 2 {
            return Err(CliError::usage(format!("grid needs at least 2 points, got {count}")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(CliError::usage(format!("grid needs min < max, got {min} .. {max}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n
                }
            })
            .collect()
    }
}

/// Fully resolved parameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub radius_nm: f64,
    pub wavelength_nm: f64,
    pub n1: f64,
    pub n2: f64,
    pub modes: Vec<ModeKind>,
    pub pol: Pol,
    pub power_pw: f64,
    pub detuning_mhz: f64,
    pub gamma0_mhz: f64,
    pub dipole: Dipole,
    pub distance_nm: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_RADIUS_NM: f64 = 350.0;
pub const DEFAULT_WAVELENGTH_NM: f64 = 780.0;
pub const DEFAULT_N1: f64 = 1.4537;
pub const DEFAULT_N2: f64 = 1.0;
pub const DEFAULT_POWER_PW: f64 = 1.0;
/// Rb D2 natural linewidth `γ₀/2π`.
pub const DEFAULT_GAMMA0_MHZ: f64 = 6.065;
pub const DEFAULT_DISTANCE_NM: f64 = 20.0;
pub const RADIAL_START_OFFSET_NM: f64 = 5.0;
pub const RADIAL_END_OFFSET_NM: f64 = 600.0;
pub const RADIAL_POINTS: usize = 60;
pub const RADIUS_MIN_NM: f64 = 250.0;
pub const RADIUS_MAX_NM: f64 = 600.0;
pub const RADIUS_POINTS: usize = 71;

/// One resolved run: parameters plus the swept grid (absent for `modes`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub params: Params,
    pub grid: Option<Grid>,
}

impl SweepSpec {
    pub fn resolve(scenario: Scenario, o: Overrides) -> Result<Self, CliError> {
        let radius_nm = o.radius_nm.unwrap_or(DEFAULT_RADIUS_NM);
        let default_modes = match scenario {
            Scenario::Modes => Vec::new(),
            Scenario::Radial => vec![ModeKind::HE11, ModeKind::TM01, ModeKind::HE21],
            Scenario::Radius => vec![ModeKind::HE11, ModeKind::TM01, ModeKind::HE21, ModeKind::EH11],
        };
        let modes = o.modes.unwrap_or(default_modes);
        if scenario != Scenario::Modes && modes.is_empty() {
            return Err(CliError::usage("at least one --mode is required"));
        }
        let params = Params {
            radius_nm,
            wavelength_nm: o.wavelength_nm.unwrap_or(DEFAULT_WAVELENGTH_NM),
            n1: o.n1.unwrap_or(DEFAULT_N1),
            n2: o.n2.unwrap_or(DEFAULT_N2),
            modes,
            pol: o.pol.unwrap_or(Pol::X),
            power_pw: o.power_pw.unwrap_or(DEFAULT_POWER_PW),
            detuning_mhz: o.detuning_mhz.unwrap_or(0.0),
            gamma0_mhz: o.gamma0_mhz.unwrap_or(DEFAULT_GAMMA0_MHZ),
            dipole: o.dipole.unwrap_or(Dipole::SigmaPlus),
            distance_nm: o.distance_nm.unwrap_or(DEFAULT_DISTANCE_NM),
            out: o.out,
            format: o.format.unwrap_or(Format::Csv),
        };
        let grid = match scenario {
            Scenario::Modes => None,
            Scenario::Radial => Some(Grid::new(
                o.rmin_nm.unwrap_or(radius_nm + RADIAL_START_OFFSET_NM),
                o.rmax_nm.unwrap_or(radius_nm + RADIAL_END_OFFSET_NM),
                o.points.unwrap_or(RADIAL_POINTS),
            )?),
            Scenario::Radius => Some(Grid::new(
                o.rmin_nm.unwrap_or(RADIUS_MIN_NM),
                o.rmax_nm.unwrap_or(RADIUS_MAX_NM),
                o.points.unwrap_or(RADIUS_POINTS),
            )?),
        };
        for (name, v) in [
            ("wavelength-nm", params.wavelength_nm),
            ("gamma0-MHz", params.gamma0_mhz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::usage(format!("--{name} must be positive")));
            }
        }
        if !(params.power_pw >= 0.0 && params.power_pw.is_finite()) {
            return Err(CliError::usage("--power-pW must be non-negative"));
        }
        if !params.detuning_mhz.is_finite() {
            return Err(CliError::usage("--detuning-MHz must be finite"));
        }
        Ok(Self {
            scenario,
            params,
            grid,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys_and_comments() {
        let o = Overrides::from_config_str(
            "# thin fiber run\nradius-nm = 400\nPOWER_PW=0.5 # half\nmode = HE11, TM01\n\ndipole=sigma-\nformat = json\n",
        )
        .unwrap();
        assert_eq!(o.radius_nm, Some(400.0));
        assert_eq!(o.power_pw, Some(0.5));
        assert_eq!(o.modes, Some(vec![ModeKind::HE11, ModeKind::TM01]));
        assert_eq!(o.dipole, Some(Dipole::SigmaMinus));
        assert_eq!(o.format, Some(Format::Json));
        assert!(o.n1.is_none());
    }

    #[test]
    fn config_rejects_garbage() {
        assert!(Overrides::from_config_str("radius-nm 400").is_err());
        assert!(Overrides::from_config_str("colour = red").is_err());
        assert!(Overrides::from_config_str("n1 = high").is_err());
        assert!(Overrides::from_config_str("mode = XY11").is_err());
    }

    #[test]
    fn flags_beat_config_beat_defaults() {
        let file = Overrides {
            radius_nm: Some(400.0),
            n1: Some(1.5),
            ..Default::default()
        };
        let flags = Overrides {
            radius_nm: Some(300.0),
            ..Default::default()
        };
        let spec = SweepSpec::resolve(Scenario::Radial, file.overlay(flags)).unwrap();
        assert_eq!(spec.params.radius_nm, 300.0);
        assert_eq!(spec.params.n1, 1.5);
        assert_eq!(spec.params.n2, DEFAULT_N2);
        let g = spec.grid.unwrap();
        assert_eq!((g.min, g.max, g.count), (305.0, 900.0, RADIAL_POINTS));
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = Grid::new(250.0, 600.0, 71).unwrap();
        let p = g.points();
        assert_eq!(p[0], 250.0);
        assert_eq!(p[70], 600.0);
        assert!((p[7] - 285.0).abs() < 1e-12);
        assert!(Grid::new(1.0, 2.0, 1).is_err());
        assert!(Grid::new(2.0, 1.0, 5).is_err());
    }

    #[test]
    fn default_modes_per_scenario() {
        let r = SweepSpec::resolve(Scenario::Radius, Overrides::default()).unwrap();
        assert_eq!(r.params.modes.len(), 4);
        let m = SweepSpec::resolve(Scenario::Modes, Overrides::default()).unwrap();
        assert!(m.grid.is_none());
        let empty = Overrides {
            modes: Some(vec![]),
            ..Default::default()
        };
        assert!(SweepSpec::resolve(Scenario::Radial, empty).is_err());
    }
}
