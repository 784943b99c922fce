//! Lifshitz free energy per unit area: momentum quadrature, Matsubara
//! summation and the zero-temperature continuum limit.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{C, HBAR};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_fallible, Integral, Tolerance};
use crate::reflection::{CoefficientFamily, FrequencySlice};
use crate::system::PlateSystem;

/// Width of the `y` window above `zeta_l`; the integrand carries `e^-y`.
const Y_WINDOW: f64 = 60.0;
/// Upper limit of the continuum `zeta` integral.
const ZETA_WINDOW: f64 = 60.0;
const PANEL_EDGES: [f64; 7] = [0.0, 0.5, 2.0, 6.0, 15.0, 30.0, 60.0];
/// Matsubara terms evaluated per parallel batch.
const BLOCK: u64 = 32;
const QUIET_TERMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    /// Integrand evaluation budget for one Matsubara term.
    pub max_nodes_per_term: usize,
    /// Relative size below which a Matsubara term counts as negligible.
    pub term_cutoff: f64,
    pub max_l: u64,
    /// Keep `(l, term)` pairs in the result.
    pub record_terms: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_nodes_per_term: 2048,
            term_cutoff: 1e-12,
            max_l: 1_000_000,
            record_terms: false,
        }
    }
}

impl QuadratureSpec {
    /// Tight settings for finite differences of the free energy.
    pub fn precise() -> Self {
        Self {
            rel_tol: 1e-13,
            max_nodes_per_term: 8192,
            term_cutoff: 1e-16,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_nodes_per_term < 16 {
            return Err(Error::InvalidInput(format!(
                "max_nodes_per_term must be >= 16, got {}",
                self.max_nodes_per_term
            )));
        }
        if !(self.term_cutoff > 0.0) {
            return Err(Error::InvalidInput(format!(
                "term_cutoff must be > 0, got {}",
                self.term_cutoff
            )));
        }
        if self.max_l == 0 {
            return Err(Error::InvalidInput("max_l must be >= 1".into()));
        }
        Ok(())
    }

    fn tolerance(&self, scale: f64) -> Tolerance {
        Tolerance {
            rel: self.rel_tol * scale,
            abs: 0.0,
            max_evaluations: self.max_nodes_per_term,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyResult {
    /// J/m²
    pub value: f64,
    pub terms_used: u64,
    /// J/m²
    pub est_error: f64,
    pub per_term: Option<Vec<(u64, f64)>>,
}

fn breaks(lo: f64, width: f64) -> Vec<f64> {
    PANEL_EDGES.iter().map(|e| lo + e * width / 60.0).collect()
}

/// `∫_zeta^{zeta+60} y [ln(1 - r_par² e^-y) + ln(1 - r_perp² e^-y)] dy`.
fn y_integral(slice: &FrequencySlice, zeta: f64, tol: Tolerance) -> Result<Integral> {
    if zeta >= 745.0 {
        // e^-y underflows on the whole window
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let integrand = |y: f64| -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        let [par, perp] = slice.reflectivities(y);
        Ok(y * (par.log_attenuation(y) + perp.log_attenuation(y)))
    };
    integrate_fallible(integrand, &breaks(zeta, Y_WINDOW), tol)
}

fn term_integral(
    l: u64,
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let zeta = sys.zeta(l);
    let slice = fam.at_frequency(zeta, sys.separation())?;
    let mut r = y_integral(&slice, zeta, spec.tolerance(1.0))?;
    let pre = sys.term_prefactor();
    r.value *= pre;
    r.error *= pre;
    Ok(r)
}

/// One Matsubara term in J/m², without the ½ weight of `l = 0`.
pub fn matsubara_term(
    l: u64,
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    Ok(term_integral(l, sys, fam, spec)?.value)
}

/// Free energy per unit area at `T > 0`.
///
/// Terms are computed in parallel batches and summed in ascending `l`, so
/// the result does not depend on the thread count.
pub fn free_energy(
    sys: &PlateSystem,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
) -> Result<FreeEnergyResult> {
    spec.validate()?;
    if sys.temperature() <= 0.0 {
        return Err(Error::InvalidInput(
            "free_energy needs T > 0; use zero_t_energy for T = 0".into(),
        ));
    }
    let mut sum = 0.0;
    let mut quad_error = 0.0;
    let mut quiet = 0usize;
    let mut per_term = spec.record_terms.then(Vec::new);
    let mut previous;
    let mut last = 0.0;
    let mut start = 0u64;
    loop {
        if start >= spec.max_l {
            return Err(Error::TruncationCap { max_l: spec.max_l });
        }
        let end = (start + BLOCK).min(spec.max_l);
        let block: Vec<Result<Integral>> = (start..end)
            .into_par_iter()
            .map(|l| term_integral(l, sys, fam, spec))
            .collect();
        for (l, term) in (start..end).zip(block) {
            let term = term?;
            let weight = if l == 0 { 0.5 } else { 1.0 };
            sum += weight * term.value;
            quad_error += weight * term.error;
            if let Some(v) = per_term.as_mut() {
                v.push((l, term.value));
            }
            previous = last;
            last = term.value;
            if l > 0 && term.value.abs() <= spec.term_cutoff * sum.abs() {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet == QUIET_TERMS {
                let tail = tail_estimate(last, previous, sys.zeta_step());
                return Ok(FreeEnergyResult {
                    value: sum,
                    terms_used: l + 1,
                    est_error: quad_error + tail,
                    per_term,
                });
            }
        }
        start = end;
    }
}

/// Geometric bound on the dropped terms.
fn tail_estimate(last: f64, previous: f64, zeta_step: f64) -> f64 {
    let mut q = if previous != 0.0 {
        (last / previous).abs()
    } else {
        0.0
    };
    if !(q < 1.0) {
        q = (-zeta_step).exp();
    }
    if q >= 1.0 {
        return last.abs();
    }
    last.abs() * q / (1.0 - q)
}

/// Zero-temperature energy per unit area, with the Matsubara sum replaced by
/// `(ħ/2π k_B T) ∫ dxi`.
pub fn zero_t_energy(a: f64, fam: &CoefficientFamily, spec: &QuadratureSpec) -> Result<f64> {
    Ok(zero_t_integral(a, fam, spec)?.value)
}

pub(crate) fn zero_t_integral(
    a: f64,
    fam: &CoefficientFamily,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    spec.validate()?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!(
            "separation must be positive, got {a:e} m"
        )));
    }
    // nested quadrature: the outer integrand carries the inner error, so
    // the outer tolerance stops at 1e-12
    let rel = spec.rel_tol.max(1e-12);
    let inner = Tolerance {
        rel: (0.01 * rel).max(1e-13),
        abs: 0.0,
        max_evaluations: spec.max_nodes_per_term,
    };
    let outer = Tolerance {
        rel,
        abs: 0.0,
        max_evaluations: spec.max_nodes_per_term * 4,
    };
    let mut r = integrate_fallible(
        |zeta| {
            let slice = fam.at_frequency(zeta, a)?;
            Ok(y_integral(&slice, zeta, inner)?.value)
        },
        &breaks(0.0, ZETA_WINDOW),
        outer,
    )?;
    let pre = HBAR * C / (32.0 * PI * PI * a * a * a);
    r.value *= pre;
    r.error *= pre;
    Ok(r)
}
