//! Entropy, Nernst-limit extrapolation, thermal correction, pressure and the
//! family comparison built on the free energy.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{C, K_B};
use crate::engine::{free_energy, zero_t_integral, QuadratureSpec};
use crate::error::{Error, Result};
use crate::materials::{MaterialKind, MaterialModel};
use crate::quadrature::{integrate_fallible, Tolerance};
use crate::reflection::{CoefficientFamily, Reflectivity};
use crate::system::PlateSystem;

/// Largest accepted relative gap between the step-h and step-h/2 estimates.
const DIVERGENCE_GUARD: f64 = 0.1;

/// A central difference refined by one Richardson step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    /// Estimate with step h.
    pub coarse: f64,
    /// Estimate with step h/2.
    pub fine: f64,
    /// `|coarse - fine|` plus the quadrature error carried through the
    /// differences.
    pub error: f64,
    /// Largest Matsubara term count among the four evaluations (0 at T = 0).
    pub terms_used: u64,
}

impl Derivative {
    fn from_pair(coarse: f64, fine: f64) -> Result<Self> {
        let gap = (coarse - fine).abs();
        if gap > DIVERGENCE_GUARD * coarse.abs().max(fine.abs()) {
            return Err(Error::UnstableDerivative { coarse, fine });
        }
        Ok(Self {
            value: (4.0 * fine - coarse) / 3.0,
            coarse,
            fine,
            error: gap,
            terms_used: 0,
        })
    }
}

/// One free-energy evaluation with its quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    pub value: f64,
    pub terms_used: u64,
    pub est_error: f64,
}

/// Free energy at `sys`, falling back to the continuum form at `T = 0`.
pub fn energy(
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
) -> Result<EnergyPoint> {
    if sys.temperature() == 0.0 {
        let r = zero_t_integral(sys.separation(), fam, spec)?;
        Ok(EnergyPoint {
            value: r.value,
            terms_used: 0,
            est_error: r.error,
        })
    } else {
        let r = free_energy(sys, fam, spec)?;
        Ok(EnergyPoint {
            value: r.value,
            terms_used: r.terms_used,
            est_error: r.est_error,
        })
    }
}

/// `-(g(x + h) - g(x - h))/2h` for `h` and `h/2`, evaluated concurrently.
fn central<G>(g: G, x: f64, h: f64) -> Result<Derivative>
where
    G: Fn(f64) -> Result<EnergyPoint> + Sync,
{
    let points = [x + h, x - h, x + 0.5 * h, x - 0.5 * h];
    let values: Vec<Result<EnergyPoint>> = points.par_iter().map(|&p| g(p)).collect();
    let mut v = Vec::with_capacity(4);
    for r in values {
        v.push(r?);
    }
    let coarse = -(v[0].value - v[1].value) / (2.0 * h);
    let fine = -(v[2].value - v[3].value) / h;
    let mut d = Derivative::from_pair(coarse, fine)?;
    // Richardson weights 4/3 and 1/3 on the two differences
    d.error += (4.0 / 3.0) * (v[2].est_error + v[3].est_error) / h
        + (1.0 / 3.0) * (v[0].est_error + v[1].est_error) / (2.0 * h);
    d.terms_used = v.iter().map(|p| p.terms_used).max().unwrap_or(0);
    Ok(d)
}

/// Default temperature step: `max(0.5 K, 0.02 T)`.
pub fn default_dt(temperature: f64) -> f64 {
    (0.02 * temperature).max(0.5)
}

/// `S = -dF/dT` in J/(K·m²).
pub fn entropy(
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
    dt: f64,
) -> Result<Derivative> {
    let t = sys.temperature();
    if !(dt > 0.0 && t - dt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "temperature step {dt} K must be positive and below T = {t} K"
        )));
    }
    central(
        |temp| energy(&sys.with_temperature(temp)?, fam, spec),
        t,
        dt,
    )
}

/// Force per unit area `-dF/da` in N/m²; attraction is negative.
pub fn pressure(
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
    da: f64,
) -> Result<Derivative> {
    let a = sys.separation();
    if !(da > 0.0 && a - da > 0.0) {
        return Err(Error::InvalidInput(format!(
            "separation step {da:e} m must be positive and below a = {a:e} m"
        )));
    }
    central(|sep| energy(&sys.with_separation(sep)?, fam, spec), a, da)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtrapolationMethod {
    Linear,
    Richardson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyScan {
    pub separation: f64,
    /// Descending, kelvin.
    pub temperatures: Vec<f64>,
    /// J/(K·m²), one per temperature.
    pub entropy: Vec<f64>,
    /// Error estimate of each entropy value.
    pub entropy_error: Vec<f64>,
    pub terms_used: Vec<u64>,
    pub extrapolated_s0: f64,
    pub extrapolation_method: ExtrapolationMethod,
    /// Root-mean-square misfit of the extrapolation, J/(K·m²).
    pub residual: f64,
}

/// Entropy on a descending temperature grid and its linear extrapolation to
/// `T = 0` from the three lowest temperatures.
pub fn nernst_scan(
    a: f64,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
    t_grid: &[f64],
) -> Result<EntropyScan> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidInput(
            "entropy scan needs at least two temperatures".into(),
        ));
    }
    if !t_grid.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput(
            "temperature grid must be strictly descending".into(),
        ));
    }
    let lowest = t_grid[t_grid.len() - 1];
    if !(lowest >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "temperatures must be >= 1 K, got {lowest} K"
        )));
    }
    let base = PlateSystem::new(a, t_grid[0])?;
    let points: Vec<Result<Derivative>> = t_grid
        .par_iter()
        .map(|&t| entropy(&base.with_temperature(t)?, fam, spec, default_dt(t)))
        .collect();
    let mut entropy_values = Vec::with_capacity(t_grid.len());
    let mut errors = Vec::with_capacity(t_grid.len());
    let mut terms_used = Vec::with_capacity(t_grid.len());
    for p in points {
        let d = p?;
        entropy_values.push(d.value);
        errors.push(d.error);
        terms_used.push(d.terms_used);
    }
    let k = t_grid.len().min(3);
    let ts = &t_grid[t_grid.len() - k..];
    let ss = &entropy_values[t_grid.len() - k..];
    let (intercept, slope) = linear_fit(ts, ss);
    let residual = (ts
        .iter()
        .zip(ss)
        .map(|(t, s)| (s - intercept - slope * t).powi(2))
        .sum::<f64>()
        / k as f64)
        .sqrt();
    Ok(EntropyScan {
        separation: a,
        temperatures: t_grid.to_vec(),
        entropy: entropy_values,
        entropy_error: errors,
        terms_used,
        extrapolated_s0: intercept,
        extrapolation_method: ExtrapolationMethod::Linear,
        residual,
    })
}

/// Least-squares line; returns `(intercept, slope)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Entropy deficit of a Drude metal as `T -> 0` at fixed relaxation: the
/// missing static TE term of the plasma model with the same `omega_p`,
/// `(k_B/4π) ∫ k dk |ln(1 - r² e^{-2ak})|`, in J/(K·m²).
pub fn drude_entropy_deficit_oracle(
    a: f64,
    m: &MaterialModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let omega_p = match m.kind {
        MaterialKind::Drude { omega_p, .. } => omega_p,
        _ => {
            return Err(Error::InvalidMaterial(format!(
                "deficit oracle needs a Drude material, got {}",
                m.kind_name()
            )))
        }
    };
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!(
            "separation must be positive, got {a:e}"
        )));
    }
    let w = 2.0 * a * omega_p / C;
    let tol = Tolerance {
        rel: spec.rel_tol,
        abs: 0.0,
        max_evaluations: spec.max_nodes_per_term,
    };
    let r = integrate_fallible(
        |y| {
            if y <= 0.0 {
                return Ok(0.0);
            }
            let s = y.hypot(w);
            let r = (y - s) / (y + s);
            let refl = Reflectivity {
                r2: r * r,
                complement: 4.0 * y * s / ((y + s) * (y + s)),
            };
            Ok(-y * refl.log_attenuation(y))
        },
        &[0.0, 0.5, 2.0, 6.0, 15.0, 30.0, 60.0],
        tol,
    )?;
    Ok(K_B / (16.0 * PI * a * a) * r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalCorrection {
    /// F(a, T), J/m²
    pub free_energy: f64,
    /// E(a) at T = 0, J/m²
    pub zero_t_energy: f64,
    /// F - E, J/m²
    pub correction: f64,
    /// |F - E| / |E|
    pub ratio: f64,
    pub terms_used: u64,
    /// J/m², combined for F and E
    pub est_error: f64,
}

pub fn thermal_correction(
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
) -> Result<ThermalCorrection> {
    let (f, e) = rayon::join(
        || free_energy(sys, fam, spec),
        || zero_t_integral(sys.separation(), fam, spec),
    );
    let (f, e) = (f?, e?);
    let correction = f.value - e.value;
    let ratio = if e.value != 0.0 {
        correction.abs() / e.value.abs()
    } else {
        0.0
    };
    Ok(ThermalCorrection {
        free_energy: f.value,
        zero_t_energy: e.value,
        correction,
        ratio,
        terms_used: f.terms_used,
        est_error: f.est_error + e.error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub family: String,
    pub free_energy: f64,
    pub thermal_correction: f64,
    pub correction_ratio: f64,
    pub terms_used: u64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub separation: f64,
    pub temperature: f64,
    pub models: Vec<ComparisonRow>,
}

/// The three rows of the standard comparison for a material: the
/// dielectric family with the material as given, the impedance family with
/// its dissipationless counterpart, and the ideal metal.
pub fn standard_families(material: &MaterialModel) -> Vec<CoefficientFamily> {
    vec![
        CoefficientFamily::dielectric(material.clone()),
        CoefficientFamily::impedance(material.without_relaxation()),
        CoefficientFamily::impedance(MaterialModel::ideal_metal()),
    ]
}

pub fn compare(
    sys: &PlateSystem,
    families: &[CoefficientFamily],
    spec: &QuadratureSpec,
) -> Result<ComparisonReport> {
    let rows: Vec<Result<ComparisonRow>> = families
        .par_iter()
        .map(|fam| {
            let tc = thermal_correction(sys, fam, spec)?;
            Ok(ComparisonRow {
                family: fam.label(),
                free_energy: tc.free_energy,
                thermal_correction: tc.correction,
                correction_ratio: tc.ratio,
                terms_used: tc.terms_used,
                est_error: tc.est_error,
            })
        })
        .collect();
    Ok(ComparisonReport {
        separation: sys.separation(),
        temperature: sys.temperature(),
        models: rows.into_iter().collect::<Result<_>>()?,
    })
}

pub fn standard_comparison(
    sys: &PlateSystem,
    material: &MaterialModel,
    spec: &QuadratureSpec,
) -> Result<ComparisonReport> {
    compare(sys, &standard_families(material), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::{HBAR, ZETA_3};
    use approx::assert_relative_eq;

    fn ideal() -> CoefficientFamily {
        CoefficientFamily::impedance(MaterialModel::ideal_metal())
    }

    #[test]
    fn classical_entropy_of_ideal_metal() {
        let sys = PlateSystem::new(10e-6, 300.0).unwrap();
        let s = entropy(
            &sys,
            &ideal(),
            &QuadratureSpec::precise(),
            default_dt(300.0),
        )
        .unwrap();
        let oracle = K_B * ZETA_3 / (8.0 * PI * 1e-10);
        assert_relative_eq!(s.value, oracle, max_relative = 1e-2);
        assert_relative_eq!(s.value, 6.603e-15, max_relative = 1e-2);
    }

    #[test]
    fn transparent_plates_have_no_entropy_or_pressure() {
        let vac = CoefficientFamily::dielectric(MaterialModel::vacuum());
        let sys = PlateSystem::new(1e-6, 300.0).unwrap();
        let spec = QuadratureSpec::default();
        assert_eq!(entropy(&sys, &vac, &spec, 6.0).unwrap().value, 0.0);
        assert_eq!(pressure(&sys, &vac, &spec, 5e-9).unwrap().value, 0.0);
    }

    #[test]
    fn impedance_plasma_entropy_is_positive() {
        let sys = PlateSystem::new(1e-6, 300.0).unwrap();
        let fam = CoefficientFamily::impedance(MaterialModel::gold_plasma());
        let s = entropy(&sys, &fam, &QuadratureSpec::precise(), default_dt(300.0)).unwrap();
        assert!(s.value > 0.0);
        // sign agrees with the monotone decrease of F(T)
        let spec = QuadratureSpec::precise();
        let f: Vec<f64> = [250.0, 300.0, 350.0]
            .iter()
            .map(|&t| {
                energy(&sys.with_temperature(t).unwrap(), &fam, &spec)
                    .unwrap()
                    .value
            })
            .collect();
        assert!(f[0] > f[1] && f[1] > f[2]);
    }

    #[test]
    fn zero_temperature_pressure() {
        let spec = QuadratureSpec::precise();
        let sys = PlateSystem::new(1e-6, 0.0).unwrap();
        let p = pressure(&sys, &ideal(), &spec, 0.005e-6).unwrap();
        let oracle = -PI * PI * HBAR * C / 240.0 / 1e-24;
        assert_relative_eq!(p.value, oracle, max_relative = 5e-3);
        assert_relative_eq!(p.value, -1.300e-3, max_relative = 5e-3);
        let sys2 = PlateSystem::new(2e-6, 0.0).unwrap();
        let p2 = pressure(&sys2, &ideal(), &spec, 0.01e-6).unwrap();
        assert_relative_eq!(p2.value, p.value / 16.0, max_relative = 1e-6);
    }

    #[test]
    fn deficit_oracle_limits() {
        let spec = QuadratureSpec::default();
        let a = 1e-6;
        let unit = K_B * ZETA_3 / (16.0 * PI * a * a);
        let huge = MaterialModel::drude(1e22, 1e13).unwrap();
        let v = drude_entropy_deficit_oracle(a, &huge, &spec).unwrap();
        assert_relative_eq!(v, unit, max_relative = 1e-4);
        let tiny = MaterialModel::drude(1e8, 1e13).unwrap();
        assert!(drude_entropy_deficit_oracle(a, &tiny, &spec).unwrap() < 1e-6 * unit);
        let mut last = 0.0;
        for wp in [1e14, 1e15, 1e16, 1e17] {
            let v =
                drude_entropy_deficit_oracle(a, &MaterialModel::drude(wp, 1e13).unwrap(), &spec)
                    .unwrap();
            assert!(v > last && v < unit);
            last = v;
        }
        assert!(drude_entropy_deficit_oracle(a, &MaterialModel::gold_plasma(), &spec).is_err());
    }

    #[test]
    fn comparison_rows() {
        let sys = PlateSystem::new(300e-9, 300.0).unwrap();
        let report =
            standard_comparison(&sys, &MaterialModel::gold(), &QuadratureSpec::default()).unwrap();
        let labels: Vec<_> = report.models.iter().map(|r| r.family.as_str()).collect();
        assert_eq!(
            labels,
            ["dielectric-drude", "impedance-plasma", "ideal-metal"]
        );
        for row in &report.models {
            assert!(row.correction_ratio >= 0.0);
            assert_relative_eq!(
                row.correction_ratio * (row.free_energy - row.thermal_correction).abs(),
                row.thermal_correction.abs(),
                max_relative = 1e-12
            );
        }
        let ideal_row = &report.models[2];
        assert!(ideal_row.correction_ratio < 1e-2);
    }

    #[test]
    fn scan_validation() {
        let spec = QuadratureSpec::default();
        assert!(nernst_scan(1e-6, &ideal(), &spec, &[5.0, 10.0]).is_err());
        assert!(nernst_scan(1e-6, &ideal(), &spec, &[5.0, 0.5]).is_err());
        assert!(nernst_scan(1e-6, &ideal(), &spec, &[5.0]).is_err());
    }

    #[test]
    fn guard_rejects_divergent_pair() {
        assert!(Derivative::from_pair(1.0, 1.5).is_err());
        let d = Derivative::from_pair(1.0, 1.01).unwrap();
        assert_relative_eq!(d.value, (4.04 - 1.0) / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let (b, m) = linear_fit(&[1.0, 2.0, 4.0], &[3.0, 5.0, 9.0]);
        assert_relative_eq!(b, 1.0, max_relative = 1e-14);
        assert_relative_eq!(m, 2.0, max_relative = 1e-14);
    }
}
