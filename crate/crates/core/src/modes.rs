//! Real-frequency photon modes between the plates and the oscillator-sum
//! form of the free energy.
//!
//! For a purely imaginary impedance `Z = -i·z` the mode equations take the
//! form `sin(a p + 2 atan x) = 0` with `p = sqrt(ω²/c² - k²)` and
//! `x = z ω/(c p)` (parallel) or `x = z c p/ω` (perpendicular), so the
//! spectrum is real and can be found by bracketing and bisection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::consts::{C, HBAR, K_B};
use crate::engine::{free_energy, zero_t_energy, QuadratureSpec};
use crate::error::{Error, Result};
use crate::materials::MaterialModel;
use crate::quadrature::{gauss_legendre, integrate, Tolerance};
use crate::reflection::{CoefficientFamily, Polarization};
use crate::system::PlateSystem;

/// Scan steps per asymptotic root spacing `π/a`.
const STEPS_PER_SPACING: f64 = 16.0;

/// Free energy of one oscillator, `k_B T ln(2 sinh(ħω/2k_BT))`, or `ħω/2` at
/// `T = 0`.
pub fn oscillator_free_energy(omega: f64, temperature: f64) -> f64 {
    let zero_point = 0.5 * HBAR * omega;
    if temperature <= 0.0 {
        return zero_point;
    }
    let kt = K_B * temperature;
    // ln(2 sinh(x/2)) = x/2 + ln(1 - e^-x)
    zero_point + kt * (-(-HBAR * omega / kt).exp_m1()).ln()
}

/// Thermal part of [`oscillator_free_energy`], without `ħω/2`.
fn thermal_free_energy(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let kt = K_B * temperature;
    kt * (-(-HBAR * omega / kt).exp_m1()).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub k_perp: f64,
    pub polarization: Polarization,
    /// Ascending, rad/s, all above `c·k_perp`.
    pub frequencies: Vec<f64>,
    pub count_requested: usize,
}

fn mode_phase(a: f64, k_perp: f64, z_imag: f64, pol: Polarization, p: f64) -> f64 {
    let q = k_perp.hypot(p);
    let x = match pol {
        Polarization::Parallel => z_imag * q / p,
        Polarization::Perpendicular => z_imag * p / q,
    };
    a * p + 2.0 * x.atan()
}

/// Left side of the mode equation at real frequency `omega > c·k_perp`,
/// normalized by `Δ_inf`; zero exactly at the eigenfrequencies.
pub fn mode_function(a: f64, k_perp: f64, z_imag: f64, pol: Polarization, omega: f64) -> f64 {
    let w = omega / C;
    let p = ((w - k_perp) * (w + k_perp)).max(0.0).sqrt();
    mode_phase(a, k_perp, z_imag, pol, p).sin()
}

/// The first `n_max` eigenfrequencies above `c·k_perp`.
pub fn eigenfrequencies(
    a: f64,
    k_perp: f64,
    z_imag: f64,
    pol: Polarization,
    n_max: usize,
) -> Result<ModeSpectrum> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!(
            "separation must be positive, got {a:e} m"
        )));
    }
    if !(k_perp.is_finite() && k_perp >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "k_perp must be >= 0, got {k_perp:e}"
        )));
    }
    if !(0.0..1.0).contains(&z_imag) {
        return Err(Error::InvalidInput(format!(
            "impedance magnitude must lie in [0, 1), got {z_imag}"
        )));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let g = |p: f64| mode_phase(a, k_perp, z_imag, pol, p).sin();
    let step = PI / (STEPS_PER_SPACING * a);
    // offset keeps grid points away from the Z = 0 roots p = nπ/a
    let mut lo = 0.37 * step;
    let mut g_lo = g(lo);
    let max_steps = (n_max + 4) * 2 * STEPS_PER_SPACING as usize;
    let mut roots = Vec::with_capacity(n_max);
    for _ in 0..max_steps {
        let hi = lo + step;
        let g_hi = g(hi);
        if g_lo == 0.0 {
            roots.push(lo);
        } else if g_lo.signum() != g_hi.signum() && g_hi != 0.0 {
            roots.push(bisect(&g, lo, hi, g_lo));
        }
        if roots.len() == n_max {
            let frequencies = roots.iter().map(|p| C * k_perp.hypot(*p)).collect();
            return Ok(ModeSpectrum {
                k_perp,
                polarization: pol,
                frequencies,
                count_requested: n_max,
            });
        }
        lo = hi;
        g_lo = g_hi;
    }
    Err(Error::BracketFailure {
        lo: C * k_perp.hypot(0.37 * step),
        hi: C * k_perp.hypot(lo),
        found: roots.len(),
    })
}

fn bisect<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, mut g_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Discretization of the renormalized mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGrid {
    /// Gauss–Legendre nodes in `u`, with `k_perp = k_max u²`.
    pub k_nodes: usize,
    /// Highest mode index summed explicitly.
    pub n_max: usize,
    /// `k_max · a`
    pub k_max_a: f64,
}

impl ModeGrid {
    pub fn reference() -> Self {
        Self {
            k_nodes: 48,
            n_max: 200,
            k_max_a: 20.0,
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            k_nodes: 2 * self.k_nodes,
            n_max: 2 * self.n_max,
            k_max_a: self.k_max_a,
        }
    }
}

/// Renormalized oscillator sum for one `k_perp` of the ideal metal: TM
/// branch `ω = ck` plus both polarizations of `ω_n = c sqrt(k² + (nπ/a)²)`,
/// minus the `a -> ∞` continuum. The zero-point part is cut at `n_max` and
/// its cutoff-end Euler–Maclaurin terms are removed.
fn renormalized_mode_sum(a: f64, temperature: f64, k: f64, n_max: usize) -> f64 {
    let b = PI / a;
    let omega = |nu: f64| C * k.hypot(b * nu);
    let half = 0.5 * HBAR * C;

    // zero-point part
    let nf = n_max as f64;
    let mut sum = 0.5 * HBAR * omega(0.0);
    for n in 1..=n_max {
        sum += HBAR * omega(n as f64);
    }
    let s = b * nf;
    let r = k.hypot(s);
    let asinh = if k > 0.0 {
        k * k * (s / k).asinh()
    } else {
        0.0
    };
    let continuum = half / b * 0.5 * (s * r + asinh);
    let g_n = half * r;
    let g1 = half * b * b * nf / r;
    let g3 = -half * 3.0 * b.powi(4) * k * k * nf / r.powi(5);
    let zero_point = sum - 2.0 * continuum - g_n - g1 / 6.0 + g3 / 360.0;

    if temperature <= 0.0 {
        return zero_point;
    }
    // thermal part, summed and integrated without cutoff
    let kt = K_B * temperature;
    let g_t = |nu: f64| thermal_free_energy(omega(nu), temperature);
    let mut thermal = g_t(0.0);
    let mut n = 1u64;
    loop {
        let t = 2.0 * g_t(n as f64);
        thermal += t;
        if t.abs() <= 1e-17 * thermal.abs() || t == 0.0 {
            break;
        }
        n += 1;
    }
    // ħω/k_BT = 60 bounds the continuum integral
    let w_end = 60.0 * kt / (HBAR * C);
    let nu_end = if w_end > k {
        ((w_end - k) * (w_end + k)).sqrt() / b
    } else {
        0.0
    };
    if nu_end > 0.0 {
        let edges: Vec<f64> = [0.0, 0.01, 0.05, 0.2, 0.5, 1.0]
            .iter()
            .map(|f| f * nu_end)
            .collect();
        let tol = Tolerance {
            rel: 1e-12,
            abs: 0.0,
            max_evaluations: 20_000,
        };
        if let Ok(r) = integrate(g_t, &edges, tol) {
            thermal -= 2.0 * r.value;
        }
    }
    zero_point + thermal
}

/// Ideal-metal free energy per unit area from the renormalized sum over
/// oscillator free energies, in J/m².
pub fn mode_sum_free_energy(a: f64, temperature: f64, grid: &ModeGrid) -> Result<f64> {
    if !(a > 0.0 && temperature >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need a > 0 and T >= 0, got a = {a:e} m, T = {temperature} K"
        )));
    }
    if grid.k_nodes == 0 || grid.n_max == 0 || !(grid.k_max_a > 0.0) {
        return Err(Error::InvalidInput("mode grid must be nonempty".into()));
    }
    let k_max = grid.k_max_a / a;
    let (u, w) = gauss_legendre(grid.k_nodes);
    let mut total = 0.0;
    for (ui, wi) in u.iter().zip(&w) {
        // u in [0, 1], k = k_max u², k dk = 2 k_max² u³ du
        let uu = 0.5 * (ui + 1.0);
        let k = k_max * uu * uu;
        let jac = 2.0 * k_max * k_max * uu.powi(3) * 0.5 * wi;
        total += jac * renormalized_mode_sum(a, temperature, k, grid.n_max);
    }
    Ok(total / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSumCheck {
    /// `|F_modes - F_lifshitz| / |F_lifshitz|` on the requested grid.
    pub deviation: f64,
    /// Same on the refined grid.
    pub refined_deviation: f64,
    pub mode_sum: f64,
    pub lifshitz: f64,
}

/// Largest change of the deviation under grid refinement still accepted.
const GRID_STABILITY: f64 = 0.02;

/// Compares the renormalized mode sum with the Matsubara result (or the
/// continuum energy at `T = 0`) for the ideal metal.
pub fn mode_sum_check(
    a: f64,
    temperature: f64,
    grid: &ModeGrid,
    spec: &QuadratureSpec,
) -> Result<ModeSumCheck> {
    let fam = CoefficientFamily::impedance(MaterialModel::ideal_metal());
    let lifshitz = if temperature > 0.0 {
        free_energy(&PlateSystem::new(a, temperature)?, &fam, spec)?.value
    } else {
        zero_t_energy(a, &fam, spec)?
    };
    let (coarse, fine) = rayon::join(
        || mode_sum_free_energy(a, temperature, grid),
        || mode_sum_free_energy(a, temperature, &grid.refined()),
    );
    let (coarse, fine) = (coarse?, fine?);
    let deviation = (coarse - lifshitz).abs() / lifshitz.abs();
    let refined_deviation = (fine - lifshitz).abs() / lifshitz.abs();
    if !deviation.is_finite() || (deviation - refined_deviation).abs() > GRID_STABILITY {
        return Err(Error::GridUnstable {
            coarse: deviation,
            fine: refined_deviation,
        });
    }
    Ok(ModeSumCheck {
        deviation,
        refined_deviation,
        mode_sum: coarse,
        lifshitz,
    })
}
