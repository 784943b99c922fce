//! Front end of the `casimir` binary: configuration, command dispatch and
//! deterministic CSV/JSON output.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! non-convergence.

pub mod config;
mod output;

use std::path::{Path, PathBuf};

use casimir_core::materials::Regime;
use casimir_core::modes::eigenfrequencies;
use casimir_core::thermo::{nernst_scan, standard_comparison, ExtrapolationMethod};
use casimir_core::{
    free_energy, CoefficientFamily, MaterialModel, PlateSystem, Polarization, QuadratureSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use config::{
    temperature_grid, validate_list, validate_modes, PolarizationArg, SEPARATION_RANGE,
    TEMPERATURE_RANGE,
};
pub use config::{Cli, Command, Family, Format, RunConfig};
pub use output::{render, write_atomic};

pub const THREADS_ENV: &str = "CASIMIR_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] casimir_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(casimir_core::Error::Io(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeEnergyRow {
    pub separation_m: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub family: String,
    #[serde(rename = "free_energy_J_per_m2")]
    pub free_energy_j_per_m2: f64,
    pub terms_used: u64,
    #[serde(rename = "est_error_J_per_m2")]
    pub est_error_j_per_m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyRow {
    pub separation_m: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub family: String,
    #[serde(rename = "entropy_J_per_K_m2")]
    pub entropy_j_per_k_m2: f64,
    pub terms_used: u64,
    #[serde(rename = "est_error_J_per_K_m2")]
    pub est_error_j_per_k_m2: f64,
    #[serde(rename = "extrapolated_S0_J_per_K_m2")]
    pub extrapolated_s0_j_per_k_m2: f64,
    pub extrapolation_method: ExtrapolationMethod,
    #[serde(rename = "residual_J_per_K_m2")]
    pub residual_j_per_k_m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub separation_m: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub family: String,
    #[serde(rename = "free_energy_J_per_m2")]
    pub free_energy_j_per_m2: f64,
    #[serde(rename = "thermal_correction_J_per_m2")]
    pub thermal_correction_j_per_m2: f64,
    pub correction_ratio: f64,
    pub terms_used: u64,
    #[serde(rename = "est_error_J_per_m2")]
    pub est_error_j_per_m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    pub separation_m: f64,
    pub k_perp_per_m: f64,
    #[serde(rename = "Z_imag")]
    pub impedance_imag: f64,
    pub polarization: &'static str,
    pub n: usize,
    pub omega_rad_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub material: String,
    pub omega_rad_per_s: f64,
    pub regime: &'static str,
    pub delta_n_m: f64,
    pub depth_ratio: f64,
    pub velocity_ratio: f64,
}

/// Rows produced by one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    FreeEnergy(Vec<FreeEnergyRow>),
    Entropy(Vec<EntropyRow>),
    Compare(Vec<CompareRow>),
    Modes(Vec<ModeRow>),
    Regime(Vec<RegimeRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::FreeEnergy(r) => r.len(),
            Rows::Entropy(r) => r.len(),
            Rows::Compare(r) => r.len(),
            Rows::Modes(r) => r.len(),
            Rows::Regime(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub rows: Rows,
    pub summary: String,
}

fn required<T: Clone>(value: &Option<T>, name: &str, command: Command) -> Result<T, CliError> {
    value
        .clone()
        .ok_or_else(|| CliError::Validation(format!("{} needs --{name}", command.name())))
}

pub fn resolve_material(spec: &str) -> Result<MaterialModel, CliError> {
    if let Some(m) = MaterialModel::preset(spec) {
        return Ok(m);
    }
    let path = Path::new(spec);
    if path.exists() {
        return Ok(MaterialModel::from_path(path)?);
    }
    Err(CliError::Validation(format!(
        "unknown material '{spec}': use gold, gold-plasma, ideal or a JSON file path"
    )))
}

fn family_for(family: Family, material: MaterialModel) -> CoefficientFamily {
    match family {
        Family::Dielectric => CoefficientFamily::dielectric(material),
        Family::Impedance => CoefficientFamily::impedance(material),
    }
}

fn quadrature(cfg: &RunConfig, base: QuadratureSpec) -> Result<QuadratureSpec, CliError> {
    let spec = cfg.quadrature.apply(base);
    spec.validate()?;
    Ok(spec)
}

/// Runs the configured command and returns its rows; nothing is written.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.command.ok_or_else(|| {
        CliError::Validation("no command given (config needs \"command\")".into())
    })?;
    let rows = match command {
        Command::FreeEnergy => free_energy_rows(cfg)?,
        Command::EntropyScan => entropy_rows(cfg)?,
        Command::Compare => compare_rows(cfg)?,
        Command::Modes => mode_rows(cfg)?,
        Command::Regime => regime_rows(cfg)?,
    };
    let summary = summarize(command, &rows);
    Ok(Outcome {
        command,
        rows,
        summary,
    })
}

fn free_energy_rows(cfg: &RunConfig) -> Result<Rows, CliError> {
    let cmd = Command::FreeEnergy;
    let a = required(&cfg.a, "a", cmd)?;
    let t = required(&cfg.t, "T", cmd)?;
    validate_list("a", &a, SEPARATION_RANGE)?;
    validate_list("T", &t, TEMPERATURE_RANGE)?;
    let material = resolve_material(&required(&cfg.material, "material", cmd)?)?;
    let fam = family_for(cfg.family.unwrap_or(Family::Dielectric), material);
    let spec = quadrature(cfg, QuadratureSpec::default())?;
    let points: Vec<(f64, f64)> = a
        .iter()
        .flat_map(|&a| t.iter().map(move |&t| (a, t)))
        .collect();
    let rows: Vec<Result<FreeEnergyRow, CliError>> = points
        .par_iter()
        .map(|&(a, t)| {
            let r = free_energy(&PlateSystem::new(a, t)?, &fam, &spec)?;
            Ok(FreeEnergyRow {
                separation_m: a,
                temperature_k: t,
                family: fam.label(),
                free_energy_j_per_m2: r.value,
                terms_used: r.terms_used,
                est_error_j_per_m2: r.est_error,
            })
        })
        .collect();
    Ok(Rows::FreeEnergy(
        rows.into_iter().collect::<Result<_, _>>()?,
    ))
}

fn entropy_rows(cfg: &RunConfig) -> Result<Rows, CliError> {
    let cmd = Command::EntropyScan;
    let a = required(&cfg.a, "a", cmd)?;
    validate_list("a", &a, SEPARATION_RANGE)?;
    let grid = temperature_grid(&required(&cfg.t_grid, "T-grid", cmd)?)?;
    let material = resolve_material(&required(&cfg.material, "material", cmd)?)?;
    let fam = family_for(cfg.family.unwrap_or(Family::Dielectric), material);
    let spec = quadrature(cfg, QuadratureSpec::precise())?;
    let mut rows = Vec::new();
    for &sep in &a {
        let scan = nernst_scan(sep, &fam, &spec, &grid)?;
        for i in 0..scan.temperatures.len() {
            rows.push(EntropyRow {
                separation_m: sep,
                temperature_k: scan.temperatures[i],
                family: fam.label(),
                entropy_j_per_k_m2: scan.entropy[i],
                terms_used: scan.terms_used[i],
                est_error_j_per_k_m2: scan.entropy_error[i],
                extrapolated_s0_j_per_k_m2: scan.extrapolated_s0,
                extrapolation_method: scan.extrapolation_method,
                residual_j_per_k_m2: scan.residual,
            });
        }
    }
    Ok(Rows::Entropy(rows))
}

fn compare_rows(cfg: &RunConfig) -> Result<Rows, CliError> {
    let cmd = Command::Compare;
    let a = required(&cfg.a, "a", cmd)?;
    let t = required(&cfg.t, "T", cmd)?;
    validate_list("a", &a, SEPARATION_RANGE)?;
    validate_list("T", &t, TEMPERATURE_RANGE)?;
    let material = resolve_material(&required(&cfg.material, "material", cmd)?)?;
    let spec = quadrature(cfg, QuadratureSpec::default())?;
    let mut rows = Vec::new();
    for &sep in &a {
        for &temp in &t {
            let report = standard_comparison(&PlateSystem::new(sep, temp)?, &material, &spec)?;
            for m in report.models {
                rows.push(CompareRow {
                    separation_m: report.separation,
                    temperature_k: report.temperature,
                    family: m.family,
                    free_energy_j_per_m2: m.free_energy,
                    thermal_correction_j_per_m2: m.thermal_correction,
                    correction_ratio: m.correction_ratio,
                    terms_used: m.terms_used,
                    est_error_j_per_m2: m.est_error,
                });
            }
        }
    }
    Ok(Rows::Compare(rows))
}

fn mode_rows(cfg: &RunConfig) -> Result<Rows, CliError> {
    let cmd = Command::Modes;
    let a = required(&cfg.a, "a", cmd)?;
    validate_list("a", &a, SEPARATION_RANGE)?;
    let kperp = cfg.kperp.unwrap_or(0.0);
    let z = cfg.z.unwrap_or(0.0);
    let n = required(&cfg.n, "n", cmd)?;
    validate_modes(kperp, z, n)?;
    let pols: &[Polarization] = match cfg.polarization.unwrap_or(PolarizationArg::Both) {
        PolarizationArg::Parallel => &[Polarization::Parallel],
        PolarizationArg::Perpendicular => &[Polarization::Perpendicular],
        PolarizationArg::Both => &Polarization::BOTH,
    };
    let mut rows = Vec::new();
    for &sep in &a {
        for &pol in pols {
            let s = eigenfrequencies(sep, kperp, z, pol, n)?;
            for (i, w) in s.frequencies.iter().enumerate() {
                rows.push(ModeRow {
                    separation_m: sep,
                    k_perp_per_m: kperp,
                    impedance_imag: z,
                    polarization: pol.label(),
                    n: i + 1,
                    omega_rad_per_s: *w,
                });
            }
        }
    }
    Ok(Rows::Modes(rows))
}

fn regime_rows(cfg: &RunConfig) -> Result<Rows, CliError> {
    let cmd = Command::Regime;
    let name = required(&cfg.material, "material", cmd)?;
    let material = resolve_material(&name)?;
    let omega = required(&cfg.omega, "omega", cmd)?;
    validate_list("omega", &omega, (f64::MIN_POSITIVE, f64::MAX))?;
    let mut rows = Vec::new();
    for &w in &omega {
        let r = material.classify_regime(w)?;
        rows.push(RegimeRow {
            material: name.clone(),
            omega_rad_per_s: w,
            regime: match r.value {
                Regime::NormalSkin => "normal-skin",
                Regime::OutsideNormalSkin => "outside-normal-skin",
            },
            delta_n_m: r.delta_n,
            depth_ratio: r.depth_ratio,
            velocity_ratio: r.velocity_ratio,
        });
    }
    Ok(Rows::Regime(rows))
}

fn summarize(command: Command, rows: &Rows) -> String {
    let detail = match rows {
        Rows::FreeEnergy(r) => r
            .first()
            .map(|x| format!("first F = {:e} J/m2", x.free_energy_j_per_m2)),
        Rows::Entropy(r) => r
            .first()
            .map(|x| format!("S0 = {:e} J/(K m2)", x.extrapolated_s0_j_per_k_m2)),
        Rows::Compare(r) => Some(
            r.iter()
                .map(|x| format!("{} {:.3e}", x.family, x.correction_ratio))
                .collect::<Vec<_>>()
                .join(", "),
        ),
        Rows::Modes(r) => r
            .first()
            .map(|x| format!("lowest omega = {:e} rad/s", x.omega_rad_per_s)),
        Rows::Regime(r) => r.first().map(|x| format!("first regime {}", x.regime)),
    };
    format!(
        "{}: {} rows{}",
        command.name(),
        rows.len(),
        detail.map(|d| format!("; {d}")).unwrap_or_default()
    )
}

/// Applies `CASIMIR_THREADS` to the global thread pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Validation(format!(
            "{THREADS_ENV} must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot configure thread pool: {e}")))
}

/// Executes and writes the output; returns the summary line.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let outcome = execute(cfg)?;
    let format = cfg.output.format.unwrap_or_else(|| match &cfg.output.path {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    });
    let bytes = render(&outcome, format)?;
    match &cfg.output.path {
        Some(path) => {
            write_atomic(path, &bytes)?;
            Ok(format!("{} -> {}", outcome.summary, path.display()))
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })?;
            Ok(outcome.summary)
        }
    }
}
