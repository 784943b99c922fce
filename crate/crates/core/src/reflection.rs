//! Reflection coefficients on the imaginary frequency axis.
//!
//! Two families share the Lifshitz sum:
//!
//! * dielectric: `r_par = (eps q - k)/(eps q + k)`, `r_perp = (q - k)/(q + k)`
//!   with `k² = k_perp² + eps xi²/c²`;
//! * Leontovich impedance: `r_par = (cq - Z xi)/(cq + Z xi)`,
//!   `r_perp = (xi - Z cq)/(xi + Z cq)`.
//!
//! Both are written in `y = 2aq` and `zeta = 2a xi/c`. At `xi = 0` every
//! formula is 0/0; the limits are fixed per family and model in
//! [`CoefficientFamily::at_frequency`] and never left to cancellation.
//!
//! The mode functions `Delta` are the imaginary-axis continuation of the
//! real-frequency eigenmode equations, normalized so that their `a -> ∞`
//! limit is `Delta_inf = (1 + x)²/4`; `Delta / Delta_inf = 1 - r² e^-y`.

use serde::{Deserialize, Serialize};

use crate::consts::C;
use crate::error::{Error, Result};
use crate::materials::{MaterialKind, MaterialModel};
use crate::system::{to_dimensionless, PlateSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    /// TM
    Parallel,
    /// TE
    Perpendicular,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Parallel, Polarization::Perpendicular];

    pub fn label(self) -> &'static str {
        match self {
            Polarization::Parallel => "parallel",
            Polarization::Perpendicular => "perpendicular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    DielectricLifshitz,
    LeontovichImpedance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    pub selector: FamilyKind,
    pub material: MaterialModel,
}

/// Squared reflection coefficient together with `1 - r²`, each computed
/// without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflectivity {
    pub r2: f64,
    pub complement: f64,
}

impl Reflectivity {
    pub const FULL: Reflectivity = Reflectivity {
        r2: 1.0,
        complement: 0.0,
    };
    pub const NONE: Reflectivity = Reflectivity {
        r2: 0.0,
        complement: 1.0,
    };

    /// From `r = (u - v)/(u + v)` with `u, v >= 0`.
    fn ratio(u: f64, v: f64) -> Self {
        let s = u + v;
        if s == 0.0 || !s.is_finite() {
            return Self::FULL;
        }
        let r = (u - v) / s;
        Reflectivity {
            r2: r * r,
            complement: (4.0 * (u / s) * (v / s)).min(1.0),
        }
    }

    /// `ln(1 - r² e^-y)`, accurate both for `r² e^-y -> 0` and `-> 1`.
    pub fn log_attenuation(self, y: f64) -> f64 {
        let x = self.r2 * (-y).exp();
        if x < 0.5 {
            (-x).ln_1p()
        } else {
            // 1 - r² e^-y = (1 - r²) e^-y + (1 - e^-y)
            (self.complement * (-y).exp() - (-y).exp_m1()).ln()
        }
    }
}

/// The reflection properties of one family at one imaginary frequency, ready
/// to be evaluated across transverse momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencySlice {
    /// Both polarizations fully reflecting at every momentum.
    Ideal,
    /// `zeta = 0`, fixed per-polarization rules; see [`StaticRule`].
    Static {
        parallel: StaticRule,
        perpendicular: StaticRule,
    },
    /// Dielectric family at `zeta > 0`, with `chi = eps - 1`.
    Dielectric { zeta: f64, chi: f64 },
    /// Impedance family at `zeta > 0`.
    Impedance { zeta: f64, z: f64 },
}

/// Zero-frequency reflectivity as a function of `y = 2a k_perp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticRule {
    Constant(Reflectivity),
    /// `((y - sqrt(y² + w²))/(y + sqrt(y² + w²)))²` with `w = 2a omega_p/c`:
    /// the plasma dielectric TE limit.
    PlasmaDielectric {
        w: f64,
    },
    /// `((w - y)/(w + y))²`: the plasma impedance TE limit, since
    /// `Z cq / xi -> cq/omega_p` as `xi -> 0`.
    PlasmaImpedance {
        w: f64,
    },
}

impl StaticRule {
    fn at(self, y: f64) -> Reflectivity {
        match self {
            StaticRule::Constant(r) => r,
            StaticRule::PlasmaDielectric { w } => Reflectivity::ratio(y, y.hypot(w)),
            StaticRule::PlasmaImpedance { w } => Reflectivity::ratio(w, y),
        }
    }
}

impl FrequencySlice {
    /// `[parallel, perpendicular]` reflectivities at `y`, where `y >= zeta`
    /// (and `y > 0` for the static slice).
    pub fn reflectivities(&self, y: f64) -> [Reflectivity; 2] {
        match *self {
            FrequencySlice::Ideal => [Reflectivity::FULL; 2],
            FrequencySlice::Static {
                parallel,
                perpendicular,
            } => [parallel.at(y), perpendicular.at(y)],
            FrequencySlice::Dielectric { zeta, chi } => {
                // 2a·k_l = sqrt(y² + (eps - 1) zeta²)
                let s = (y * y + chi * zeta * zeta).sqrt();
                let eps = 1.0 + chi;
                [Reflectivity::ratio(eps * y, s), Reflectivity::ratio(y, s)]
            }
            FrequencySlice::Impedance { zeta, z } => [
                Reflectivity::ratio(y, z * zeta),
                Reflectivity::ratio(zeta, z * y),
            ],
        }
    }

    pub fn reflectivity(&self, pol: Polarization, y: f64) -> Reflectivity {
        let [par, perp] = self.reflectivities(y);
        match pol {
            Polarization::Parallel => par,
            Polarization::Perpendicular => perp,
        }
    }
}

impl CoefficientFamily {
    pub fn dielectric(material: MaterialModel) -> Self {
        Self {
            selector: FamilyKind::DielectricLifshitz,
            material,
        }
    }

    pub fn impedance(material: MaterialModel) -> Self {
        Self {
            selector: FamilyKind::LeontovichImpedance,
            material,
        }
    }

    /// `<family>-<model>`, or `ideal-metal` where the family does not matter.
    pub fn label(&self) -> String {
        if matches!(self.material.kind, MaterialKind::IdealMetal) {
            return "ideal-metal".into();
        }
        let family = match self.selector {
            FamilyKind::DielectricLifshitz => "dielectric",
            FamilyKind::LeontovichImpedance => "impedance",
        };
        format!("{family}-{}", self.material.kind_name())
    }

    /// Reflection data at `zeta = 2a xi/c` for plates at `separation`.
    ///
    /// Zero-frequency limits:
    ///
    /// | model     | dielectric (par, perp)        | impedance (par, perp)   |
    /// |-----------|-------------------------------|-------------------------|
    /// | ideal     | (1, 1)                        | (1, 1)                  |
    /// | Drude     | (1, 0)                        | (1, 1)                  |
    /// | plasma    | (1, plasma TE value)          | (1, ((w-y)/(w+y))²)     |
    /// | tabulated | Eq. at xi = 0 with eps(0)     | (1, 1)                  |
    pub fn at_frequency(&self, zeta: f64, separation: f64) -> Result<FrequencySlice> {
        if !(zeta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "zeta must be >= 0, got {zeta}"
            )));
        }
        let material = &self.material;
        if matches!(material.kind, MaterialKind::IdealMetal) {
            return Ok(FrequencySlice::Ideal);
        }
        let full = StaticRule::Constant(Reflectivity::FULL);
        if zeta == 0.0 {
            let (parallel, perpendicular) = match (&self.selector, &material.kind) {
                (_, MaterialKind::IdealMetal) => unreachable!(),
                (FamilyKind::DielectricLifshitz, MaterialKind::Drude { .. }) => {
                    (full, StaticRule::Constant(Reflectivity::NONE))
                }
                (FamilyKind::DielectricLifshitz, MaterialKind::Plasma { omega_p }) => (
                    full,
                    StaticRule::PlasmaDielectric {
                        w: 2.0 * separation * omega_p / C,
                    },
                ),
                (FamilyKind::DielectricLifshitz, MaterialKind::Tabulated(_)) => {
                    let chi = material.susceptibility(0.0)?.unwrap_or(f64::INFINITY);
                    // (eps - 1)/(eps + 1) for TM, k_0 = q_0 for TE
                    (
                        StaticRule::Constant(Reflectivity::ratio(1.0 + chi, 1.0)),
                        StaticRule::Constant(Reflectivity::NONE),
                    )
                }
                (FamilyKind::LeontovichImpedance, MaterialKind::Plasma { omega_p }) => (
                    full,
                    StaticRule::PlasmaImpedance {
                        w: 2.0 * separation * omega_p / C,
                    },
                ),
                (FamilyKind::LeontovichImpedance, _) => (full, full),
            };
            return Ok(FrequencySlice::Static {
                parallel,
                perpendicular,
            });
        }
        let xi = zeta * C / (2.0 * separation);
        let chi = material
            .susceptibility(xi)?
            .expect("ideal metal handled above");
        Ok(match self.selector {
            FamilyKind::DielectricLifshitz => FrequencySlice::Dielectric { zeta, chi },
            FamilyKind::LeontovichImpedance => FrequencySlice::Impedance {
                zeta,
                z: 1.0 / (1.0 + chi).sqrt(),
            },
        })
    }

    /// Squared coefficient at Matsubara index `l` and transverse momentum
    /// `k_perp` (1/m).
    pub fn r2(&self, pol: Polarization, l: u64, k_perp: f64, sys: &PlateSystem) -> Result<f64> {
        if !(k_perp >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "k_perp must be >= 0, got {k_perp:e}"
            )));
        }
        if l == 0 && k_perp == 0.0 {
            return Err(Error::ZeroMomentumStatic);
        }
        let p = to_dimensionless(sys, l, k_perp);
        let slice = self.at_frequency(p.zeta, sys.separation())?;
        Ok(slice.reflectivity(pol, p.y).r2)
    }
}

pub fn r2_dielectric(
    pol: Polarization,
    l: u64,
    k_perp: f64,
    sys: &PlateSystem,
    material: &MaterialModel,
) -> Result<f64> {
    CoefficientFamily::dielectric(material.clone()).r2(pol, l, k_perp, sys)
}

pub fn r2_impedance(
    pol: Polarization,
    l: u64,
    k_perp: f64,
    sys: &PlateSystem,
    material: &MaterialModel,
) -> Result<f64> {
    CoefficientFamily::impedance(material.clone()).r2(pol, l, k_perp, sys)
}

/// `eta = Z xi/(cq)`, `kappa = Z cq/xi` and `Z` at one Matsubara point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedancePoint {
    pub eta: f64,
    pub kappa: f64,
    pub z: f64,
}

/// Requires `l >= 1`: at `xi = 0`, `kappa` is 0/0.
pub fn impedance_point(
    l: u64,
    k_perp: f64,
    sys: &PlateSystem,
    material: &MaterialModel,
) -> Result<ImpedancePoint> {
    if l == 0 {
        return Err(Error::InvalidInput(
            "impedance parameters need a nonzero Matsubara frequency".into(),
        ));
    }
    let p = to_dimensionless(sys, l, k_perp);
    let xi = crate::system::matsubara_frequency(l, sys.temperature());
    let z = material.impedance_imag(xi)?;
    Ok(ImpedancePoint {
        eta: z * p.zeta / p.y,
        kappa: z * p.y / p.zeta,
        z,
    })
}

fn delta(y: f64, x: f64) -> f64 {
    let a = 1.0 + x;
    let b = 1.0 - x;
    0.25 * (a * a - (-y).exp() * b * b)
}

/// Parallel-polarization mode function at `y = 2aq`: `[(1+eta)² - e^-y (1-eta)²]/4`.
pub fn delta_par(y: f64, eta: f64) -> f64 {
    delta(y, eta)
}

/// Perpendicular-polarization mode function, same form in `kappa`.
pub fn delta_perp(y: f64, kappa: f64) -> f64 {
    delta(y, kappa)
}

/// `a -> ∞` limit of the mode function, `(1 + x²)(1 + 2x/(1 + x²))/4`.
/// The polarization only selects whether `x` is `eta` or `kappa`.
pub fn delta_infinity(x: f64, _pol: Polarization) -> f64 {
    let s = 1.0 + x * x;
    0.25 * s * (1.0 + 2.0 * x / s)
}

/// Renormalized mode function `1 - r² e^-y` from the impedance family.
pub fn delta_renormalized(
    pol: Polarization,
    l: u64,
    k_perp: f64,
    sys: &PlateSystem,
    material: &MaterialModel,
) -> Result<f64> {
    let r2 = r2_impedance(pol, l, k_perp, sys, material)?;
    let y = to_dimensionless(sys, l, k_perp).y;
    Ok(1.0 - r2 * (-y).exp())
}
