//! Run configuration: command-line flags and the optional JSON document,
//! merged field by field with flags taking precedence.

use std::path::{Path, PathBuf};

use casimir_core::QuadratureSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SEPARATION_RANGE: (f64, f64) = (1e-9, 1e-3);
pub const TEMPERATURE_RANGE: (f64, f64) = (1.0, 1000.0);
const MAX_MODES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FreeEnergy,
    EntropyScan,
    Compare,
    Modes,
    Regime,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FreeEnergy => "free-energy",
            Command::EntropyScan => "entropy-scan",
            Command::Compare => "compare",
            Command::Modes => "modes",
            Command::Regime => "regime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dielectric,
    Impedance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationArg {
    Parallel,
    Perpendicular,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Thermal Casimir free energy between metal plates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Free energy per unit area over a sweep of separations and temperatures
    FreeEnergy(Flags),
    /// Entropy on a temperature grid and its extrapolation to T = 0
    EntropyScan(Flags),
    /// Thermal corrections of the dielectric, impedance and ideal-metal models
    Compare(Flags),
    /// Real eigenfrequencies for a purely imaginary surface impedance
    Modes(Flags),
    /// Normal-skin-effect classification at real frequencies
    Regime(Flags),
    /// Run the command named in a JSON config file
    Run(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Plate separations in meters, comma separated and ascending
    #[arg(long = "a", value_delimiter = ',', num_args = 1..)]
    pub a: Option<Vec<f64>>,
    /// Temperatures in kelvin, comma separated and ascending
    #[arg(long = "T", value_delimiter = ',', num_args = 1..)]
    pub t: Option<Vec<f64>>,
    /// Temperature grid for entropy-scan, kelvin
    #[arg(long = "T-grid", value_delimiter = ',', num_args = 1..)]
    pub t_grid: Option<Vec<f64>>,
    /// Preset name (gold, gold-plasma, ideal) or path to a material JSON file
    #[arg(long)]
    pub material: Option<String>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Transverse momentum in 1/m (modes)
    #[arg(long)]
    pub kperp: Option<f64>,
    /// Magnitude of the purely imaginary impedance (modes)
    #[arg(long = "Z")]
    pub z: Option<f64>,
    /// Number of eigenfrequencies (modes)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "pol", value_enum)]
    pub polarization: Option<PolarizationArg>,
    /// Real frequencies in rad/s (regime)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub omega: Option<Vec<f64>>,
    /// JSON run configuration; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; written atomically. Standard output if absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_nodes_per_term: Option<usize>,
    #[arg(long)]
    pub term_cutoff: Option<f64>,
    #[arg(long)]
    pub max_l: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub rel_tol: Option<f64>,
    pub max_nodes_per_term: Option<usize>,
    pub term_cutoff: Option<f64>,
    pub max_l: Option<u64>,
}

impl QuadratureOverrides {
    fn or(self, other: Self) -> Self {
        Self {
            rel_tol: self.rel_tol.or(other.rel_tol),
            max_nodes_per_term: self.max_nodes_per_term.or(other.max_nodes_per_term),
            term_cutoff: self.term_cutoff.or(other.term_cutoff),
            max_l: self.max_l.or(other.max_l),
        }
    }

    pub fn apply(&self, mut spec: QuadratureSpec) -> QuadratureSpec {
        if let Some(v) = self.rel_tol {
            spec.rel_tol = v;
        }
        if let Some(v) = self.max_nodes_per_term {
            spec.max_nodes_per_term = v;
        }
        if let Some(v) = self.term_cutoff {
            spec.term_cutoff = v;
        }
        if let Some(v) = self.max_l {
            spec.max_l = v;
        }
        spec
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Everything a run needs; every field is optional until [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub a: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: Option<Vec<f64>>,
    #[serde(rename = "T_grid")]
    pub t_grid: Option<Vec<f64>>,
    pub material: Option<String>,
    pub family: Option<Family>,
    pub kperp: Option<f64>,
    #[serde(rename = "Z")]
    pub z: Option<f64>,
    pub n: Option<usize>,
    pub polarization: Option<PolarizationArg>,
    pub omega: Option<Vec<f64>>,
    pub quadrature: QuadratureOverrides,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    fn from_flags(command: Option<Command>, f: Flags) -> Self {
        Self {
            command,
            a: f.a,
            t: f.t,
            t_grid: f.t_grid,
            material: f.material,
            family: f.family,
            kperp: f.kperp,
            z: f.z,
            n: f.n,
            polarization: f.polarization,
            omega: f.omega,
            quadrature: QuadratureOverrides {
                rel_tol: f.rel_tol,
                max_nodes_per_term: f.max_nodes_per_term,
                term_cutoff: f.term_cutoff,
                max_l: f.max_l,
            },
            output: OutputConfig {
                path: f.out,
                format: f.format,
            },
        }
    }

    /// Field-wise merge; values in `self` win.
    pub fn or(self, other: Self) -> Self {
        Self {
            command: self.command.or(other.command),
            a: self.a.or(other.a),
            t: self.t.or(other.t),
            t_grid: self.t_grid.or(other.t_grid),
            material: self.material.or(other.material),
            family: self.family.or(other.family),
            kperp: self.kperp.or(other.kperp),
            z: self.z.or(other.z),
            n: self.n.or(other.n),
            polarization: self.polarization.or(other.polarization),
            omega: self.omega.or(other.omega),
            quadrature: self.quadrature.or(other.quadrature),
            output: OutputConfig {
                path: self.output.path.or(other.output.path),
                format: self.output.format.or(other.output.format),
            },
        }
    }

    /// Builds the configuration from parsed arguments, reading `--config`
    /// when given.
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (command, flags) = match cli.command {
            CliCommand::FreeEnergy(f) => (Some(Command::FreeEnergy), f),
            CliCommand::EntropyScan(f) => (Some(Command::EntropyScan), f),
            CliCommand::Compare(f) => (Some(Command::Compare), f),
            CliCommand::Modes(f) => (Some(Command::Modes), f),
            CliCommand::Regime(f) => (Some(Command::Regime), f),
            CliCommand::Run(f) => (None, f),
        };
        let file = match &flags.config {
            Some(p) => Self::from_path(p)?,
            None => Self::default(),
        };
        if let (Some(cmd), Some(file_cmd)) = (command, file.command) {
            if cmd != file_cmd {
                return Err(CliError::Validation(format!(
                    "config file is for '{}' but the command is '{}'",
                    file_cmd.name(),
                    cmd.name()
                )));
            }
        }
        Ok(Self::from_flags(command, flags).or(file))
    }
}

pub fn validate_list(name: &str, values: &[f64], range: (f64, f64)) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Validation(format!("{name} must not be empty")));
    }
    for &v in values {
        if !(v.is_finite() && v >= range.0 && v <= range.1) {
            return Err(CliError::Validation(format!(
                "{name} = {v:e} outside [{:e}, {:e}]",
                range.0, range.1
            )));
        }
    }
    if !values.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Validation(format!(
            "{name} must be strictly ascending"
        )));
    }
    Ok(())
}

pub fn validate_modes(kperp: f64, z: f64, n: usize) -> Result<(), CliError> {
    if !(kperp.is_finite() && kperp >= 0.0) {
        return Err(CliError::Validation(format!(
            "kperp must be >= 0, got {kperp:e}"
        )));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(CliError::Validation(format!(
            "Z must lie in [0, 1), got {z}"
        )));
    }
    if n == 0 || n > MAX_MODES {
        return Err(CliError::Validation(format!(
            "n must lie in [1, {MAX_MODES}], got {n}"
        )));
    }
    Ok(())
}

/// Accepts a strictly monotone grid in either direction and returns it
/// descending.
pub fn temperature_grid(values: &[f64]) -> Result<Vec<f64>, CliError> {
    let mut v = values.to_vec();
    if v.len() >= 2 && v[0] < v[1] {
        v.reverse();
    }
    let mut ascending = v.clone();
    ascending.reverse();
    validate_list("T-grid", &ascending, TEMPERATURE_RANGE)?;
    if v.len() < 2 {
        return Err(CliError::Validation(
            "T-grid needs at least two temperatures".into(),
        ));
    }
    Ok(v)
}
