//! Command-line sweeps of the chiral axial force of guided light on an atom
//! near a nanofiber.

pub mod config;
pub mod error;
pub mod sweep;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use chiralforce_core::{Dipole, ModeKind};
use clap::{Args, Parser, Subcommand};

use config::{parse_dipole, Format, Overrides, Pol, Scenario, SweepSpec};
pub use error::CliError;
pub use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "chiralforce", version, about, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List guided modes at the transition wavelength
    Modes(CommonArgs),
    /// Force and asymmetry versus atom radial position
    RadialSweep(CommonArgs),
    /// Force and asymmetry versus fiber radius at fixed surface distance
    RadiusSweep(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat key = value file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fiber radius a (nm)
    #[arg(long = "radius-nm")]
    pub radius_nm: Option<f64>,
    /// Transition wavelength λ0 (nm)
    #[arg(long = "wavelength-nm")]
    pub wavelength_nm: Option<f64>,
    /// Core index
    #[arg(long)]
    pub n1: Option<f64>,
    /// Cladding index
    #[arg(long)]
    pub n2: Option<f64>,
    /// Drive mode, e.g. HE11; repeat or comma-separate for several
    #[arg(long = "mode", value_delimiter = ',', value_parser = parse_mode)]
    pub mode: Vec<ModeKind>,
    /// Drive polarization axis for HE/EH modes
    #[arg(long)]
    pub pol: Option<Pol>,
    /// Drive power (pW)
    #[arg(long = "power-pW")]
    pub power_pw: Option<f64>,
    /// Laser detuning Δ/2π (MHz)
    #[arg(long = "detuning-MHz")]
    pub detuning_mhz: Option<f64>,
    /// Free-space linewidth γ0/2π (MHz)
    #[arg(long = "gamma0-MHz")]
    pub gamma0_mhz: Option<f64>,
    /// Atomic dipole orientation: sigma+, sigma- or linear-x
    #[arg(long, value_parser = parse_dipole)]
    pub dipole: Option<Dipole>,
    /// Start of the swept grid (nm): r for radial-sweep, a for radius-sweep
    #[arg(long = "rmin-nm")]
    pub rmin_nm: Option<f64>,
    /// End of the swept grid (nm)
    #[arg(long = "rmax-nm")]
    pub rmax_nm: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,
    /// Atom–surface distance r − a for radius-sweep (nm)
    #[arg(long = "distance-nm")]
    pub distance_nm: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
}

fn parse_mode(s: &str) -> Result<ModeKind, String> {
    s.parse::<ModeKind>().map_err(|e| e.to_string())
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            radius_nm: self.radius_nm,
            wavelength_nm: self.wavelength_nm,
            n1: self.n1,
            n2: self.n2,
            modes: (!self.mode.is_empty()).then(|| self.mode.clone()),
            pol: self.pol,
            power_pw: self.power_pw,
            detuning_mhz: self.detuning_mhz,
            gamma0_mhz: self.gamma0_mhz,
            dipole: self.dipole,
            rmin_nm: self.rmin_nm,
            rmax_nm: self.rmax_nm,
            points: self.points,
            distance_nm: self.distance_nm,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

impl Command {
    fn parts(&self) -> (Scenario, &CommonArgs) {
        match self {
            Command::Modes(a) => (Scenario::Modes, a),
            Command::RadialSweep(a) => (Scenario::Radial, a),
            Command::RadiusSweep(a) => (Scenario::Radius, a),
        }
    }

    /// Defaults < config file < flags.
    pub fn resolve(&self) -> Result<SweepSpec, CliError> {
        let (scenario, args) = self.parts();
        let file = match &args.config {
            Some(path) => Overrides::from_config_file(path)?,
            None => Overrides::default(),
        };
        SweepSpec::resolve(scenario, file.overlay(args.overrides()))
    }
}

pub fn write_table(table: &Table, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => table.write_csv(w),
        Format::Json => table.write_json(w),
    }
}

/// Resolve, compute and emit one run.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let spec = cli.command.resolve()?;
    let table = sweep::run(&spec)?;
    let format = spec.params.format;
    match &spec.params.out {
        Some(path) => {
            let io_err = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            write_table(&table, format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let io_err = |source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            };
            write_table(&table, format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
    }
    Ok(())
}
