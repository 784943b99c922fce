//! Permittivity and Leontovich impedance on the imaginary frequency axis,
//! material presets, and the normal-skin-effect regime classifier.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::consts::C;
use crate::error::{Error, Result};

/// Threshold standing in for "much less than" in the skin-effect conditions.
pub const MUCH_LESS_RATIO: f64 = 0.1;

/// Smallest stored value of `eps - 1` in a table; keeps `ln(eps - 1)` finite
/// for vacuum-like nodes.
const MIN_SUSCEPTIBILITY: f64 = 1e-300;

/// Tabulated `eps(i xi)`, interpolated with a monotone cubic in
/// `(ln xi, ln(eps - 1))` and clamped outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityTable {
    nodes: Vec<(f64, f64)>,
    ln_xi: Vec<f64>,
    ln_chi: Vec<f64>,
    slopes: Vec<f64>,
}

impl PermittivityTable {
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMaterial(
                "table needs at least two (xi, eps) nodes".into(),
            ));
        }
        for (i, &(xi, eps)) in nodes.iter().enumerate() {
            if !(xi.is_finite() && xi > 0.0) {
                return Err(Error::InvalidMaterial(format!(
                    "table node {i}: xi must be positive, got {xi:e}"
                )));
            }
            if !(eps.is_finite() && eps >= 1.0) {
                return Err(Error::InvalidMaterial(format!(
                    "table node {i}: eps must be >= 1, got {eps}"
                )));
            }
            if i > 0 && xi <= nodes[i - 1].0 {
                return Err(Error::InvalidMaterial(
                    "table xi must be strictly increasing".into(),
                ));
            }
        }
        let ln_xi: Vec<f64> = nodes.iter().map(|&(xi, _)| xi.ln()).collect();
        let ln_chi: Vec<f64> = nodes
            .iter()
            .map(|&(_, eps)| (eps - 1.0).max(MIN_SUSCEPTIBILITY).ln())
            .collect();
        let slopes = monotone_slopes(&ln_xi, &ln_chi);
        Ok(Self {
            nodes,
            ln_xi,
            ln_chi,
            slopes,
        })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// `eps - 1` at `xi >= 0`.
    fn susceptibility(&self, xi: f64) -> f64 {
        let n = self.nodes.len();
        if xi <= self.nodes[0].0 {
            return clamp_chi(self.nodes[0].1);
        }
        if xi >= self.nodes[n - 1].0 {
            return clamp_chi(self.nodes[n - 1].1);
        }
        let t = xi.ln();
        let k = self.ln_xi.partition_point(|&x| x <= t) - 1;
        let h = self.ln_xi[k + 1] - self.ln_xi[k];
        let s = (t - self.ln_xi[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let v = h00 * self.ln_chi[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ln_chi[k + 1]
            + h11 * h * self.slopes[k + 1];
        v.exp()
    }
}

fn clamp_chi(eps: f64) -> f64 {
    let chi = eps - 1.0;
    if chi <= MIN_SUSCEPTIBILITY {
        0.0
    } else {
        chi
    }
}

/// Fritsch–Butland tangents: monotone between nodes, zero at local extrema.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let (h0, h1) = (h[k - 1], h[k]);
            m[k] = 3.0 * (h0 + h1) / ((2.0 * h1 + h0) / d[k - 1] + (h1 + 2.0 * h0) / d[k]);
        }
    }
    // endpoint tangents must not overshoot the first/last segment
    for (k, seg) in [(0usize, 0usize), (n - 1, n - 2)] {
        if m[k] * d[seg] <= 0.0 {
            m[k] = 0.0;
        } else if (m[k] / d[seg]).abs() > 3.0 {
            m[k] = 3.0 * d[seg];
        }
    }
    m
}

/// Electronic transport parameters used only by [`MaterialModel::classify_regime`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transport {
    /// dc conductivity in Gaussian units, 1/s
    pub sigma_gauss: f64,
    /// electron mean free path, m
    pub mean_free_path: f64,
    /// Fermi velocity, m/s
    pub fermi_velocity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialKind {
    /// `eps = ∞`, `Z ≡ 0`
    IdealMetal,
    /// `eps(i xi) = 1 + omega_p² / xi²`
    Plasma {
        omega_p: f64,
    },
    /// `eps(i xi) = 1 + omega_p² / (xi (xi + gamma))`
    Drude {
        omega_p: f64,
        gamma: f64,
    },
    Tabulated(PermittivityTable),
}

/// Value of the permittivity on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Permittivity {
    Infinite,
    Finite(f64),
}

impl Permittivity {
    pub fn value(self) -> f64 {
        match self {
            Permittivity::Infinite => f64::INFINITY,
            Permittivity::Finite(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub kind: MaterialKind,
    pub transport: Option<Transport>,
}

impl MaterialModel {
    pub fn ideal_metal() -> Self {
        Self {
            kind: MaterialKind::IdealMetal,
            transport: None,
        }
    }

    pub fn plasma(omega_p: f64) -> Result<Self> {
        check_positive("omega_p", omega_p)?;
        Ok(Self {
            kind: MaterialKind::Plasma { omega_p },
            transport: None,
        })
    }

    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self> {
        check_positive("omega_p", omega_p)?;
        check_positive("gamma", gamma)?;
        Ok(Self {
            kind: MaterialKind::Drude { omega_p, gamma },
            transport: None,
        })
    }

    pub fn tabulated(nodes: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self {
            kind: MaterialKind::Tabulated(PermittivityTable::new(nodes)?),
            transport: None,
        })
    }

    /// Frequency-independent permittivity, stored as a flat two-node table.
    pub fn constant(eps: f64) -> Result<Self> {
        Self::tabulated(vec![(1.0, eps), (1e30, eps)])
    }

    /// `eps ≡ 1`: both reflection families vanish identically.
    pub fn vacuum() -> Self {
        Self::constant(1.0).expect("vacuum table is valid")
    }

    pub fn with_transport(mut self, transport: Transport) -> Self {
        self.transport = Some(transport);
        self
    }

    /// Gold as a Drude metal. These are conventional literature values, not
    /// fitted to any data set.
    pub fn gold() -> Self {
        Self::drude(1.37e16, 5.3e13)
            .expect("gold parameters are positive")
            .with_transport(GOLD_TRANSPORT)
    }

    /// Gold with relaxation switched off.
    pub fn gold_plasma() -> Self {
        Self::plasma(1.37e16)
            .expect("gold parameters are positive")
            .with_transport(GOLD_TRANSPORT)
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "gold" | "gold-drude" | "au" => Some(Self::gold()),
            "gold-plasma" => Some(Self::gold_plasma()),
            "ideal" | "ideal-metal" => Some(Self::ideal_metal()),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MaterialKind::IdealMetal => "ideal",
            MaterialKind::Plasma { .. } => "plasma",
            MaterialKind::Drude { .. } => "drude",
            MaterialKind::Tabulated(_) => "tabulated",
        }
    }

    pub fn plasma_frequency(&self) -> Option<f64> {
        match self.kind {
            MaterialKind::Plasma { omega_p } | MaterialKind::Drude { omega_p, .. } => Some(omega_p),
            _ => None,
        }
    }

    /// The dissipationless counterpart of a Drude metal (same `omega_p`); any
    /// other model is returned unchanged.
    pub fn without_relaxation(&self) -> Self {
        match self.kind {
            MaterialKind::Drude { omega_p, .. } => Self {
                kind: MaterialKind::Plasma { omega_p },
                transport: self.transport,
            },
            _ => self.clone(),
        }
    }

    /// `eps(i xi) - 1`, or `None` for the ideal metal. Errors at `xi = 0` for
    /// Plasma and Drude, whose permittivity diverges there.
    pub fn susceptibility(&self, xi: f64) -> Result<Option<f64>> {
        if !(xi >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "imaginary frequency must be non-negative, got {xi:e}"
            )));
        }
        match &self.kind {
            MaterialKind::IdealMetal => Ok(None),
            MaterialKind::Plasma { omega_p } => {
                if xi == 0.0 {
                    return Err(Error::StaticLimitRequired { model: "plasma" });
                }
                let r = omega_p / xi;
                Ok(Some(r * r))
            }
            MaterialKind::Drude { omega_p, gamma } => {
                if xi == 0.0 {
                    return Err(Error::StaticLimitRequired { model: "Drude" });
                }
                Ok(Some(omega_p * omega_p / (xi * (xi + gamma))))
            }
            MaterialKind::Tabulated(t) => Ok(Some(t.susceptibility(xi))),
        }
    }

    pub fn eps_imag(&self, xi: f64) -> Result<Permittivity> {
        Ok(match self.susceptibility(xi)? {
            None => Permittivity::Infinite,
            Some(chi) => Permittivity::Finite(1.0 + chi),
        })
    }

    /// Leontovich impedance `Z(i xi) = 1/sqrt(eps(i xi))`, real and in `[0, 1]`.
    /// Zero for the ideal metal, and the `xi -> 0` limit (zero) for Plasma
    /// and Drude.
    pub fn impedance_imag(&self, xi: f64) -> Result<f64> {
        match self.kind {
            MaterialKind::Plasma { .. } | MaterialKind::Drude { .. } if xi == 0.0 => Ok(0.0),
            _ => Ok(match self.susceptibility(xi)? {
                None => 0.0,
                Some(chi) => 1.0 / (1.0 + chi).sqrt(),
            }),
        }
    }

    /// Normal-skin-effect test at real frequency `omega`: both
    /// `l / delta_n < 0.1` and `l·omega / v_F < 0.1` must hold, where
    /// `delta_n = c / sqrt(2π sigma omega)` with the Gaussian conductivity.
    /// With `c` in m/s the penetration depth comes out in meters.
    pub fn classify_regime(&self, omega: f64) -> Result<SkinRegime> {
        let t = self.transport.ok_or(Error::MissingTransport)?;
        check_positive("omega", omega)?;
        check_positive("sigma", t.sigma_gauss)?;
        check_positive("mean free path", t.mean_free_path)?;
        check_positive("Fermi velocity", t.fermi_velocity)?;
        let delta_n = C / (2.0 * PI * t.sigma_gauss * omega).sqrt();
        let depth_ratio = t.mean_free_path / delta_n;
        let velocity_ratio = t.mean_free_path * omega / t.fermi_velocity;
        let checks = (
            depth_ratio < MUCH_LESS_RATIO,
            velocity_ratio < MUCH_LESS_RATIO,
        );
        Ok(SkinRegime {
            value: if checks.0 && checks.1 {
                Regime::NormalSkin
            } else {
                Regime::OutsideNormalSkin
            },
            delta_n,
            depth_ratio,
            velocity_ratio,
            checks,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: MaterialDocument = serde_json::from_str(s)?;
        doc.try_into()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_document(&self) -> MaterialDocument {
        let (omega_p, gamma, table) = match &self.kind {
            MaterialKind::IdealMetal => (None, None, None),
            MaterialKind::Plasma { omega_p } => (Some(*omega_p), None, None),
            MaterialKind::Drude { omega_p, gamma } => (Some(*omega_p), Some(*gamma), None),
            MaterialKind::Tabulated(t) => (
                None,
                None,
                Some(t.nodes().iter().map(|&(x, e)| [x, e]).collect()),
            ),
        };
        MaterialDocument {
            kind: self.kind_name().to_string(),
            omega_p_rad_s: omega_p,
            gamma_rad_s: gamma,
            table,
            sigma_gauss_inv_s: self.transport.map(|t| t.sigma_gauss),
            mean_free_path_m: self.transport.map(|t| t.mean_free_path),
            v_f_m_s: self.transport.map(|t| t.fermi_velocity),
        }
    }
}

const GOLD_TRANSPORT: Transport = Transport {
    sigma_gauss: 4.04e17,
    mean_free_path: 4.0e-8,
    fermi_velocity: 1.4e6,
};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMaterial(format!(
            "{name} must be positive and finite, got {v:e}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    NormalSkin,
    OutsideNormalSkin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkinRegime {
    pub value: Regime,
    /// penetration depth, m
    pub delta_n: f64,
    /// `l / delta_n`
    pub depth_ratio: f64,
    /// `l·omega / v_F`
    pub velocity_ratio: f64,
    pub checks: (bool, bool),
}

/// JSON form of a material:
/// `{"kind": "drude", "omega_p_rad_s": .., "gamma_rad_s": .., "table": [[xi, eps], ..],
///   "sigma_gauss_inv_s": .., "mean_free_path_m": .., "v_F_m_s": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialDocument {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_gauss_inv_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_free_path_m: Option<f64>,
    #[serde(rename = "v_F_m_s", default, skip_serializing_if = "Option::is_none")]
    pub v_f_m_s: Option<f64>,
}

impl TryFrom<MaterialDocument> for MaterialModel {
    type Error = Error;

    fn try_from(doc: MaterialDocument) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidMaterial(format!("{} requires {name}", doc.kind)))
        };
        let mut model = match doc.kind.to_ascii_lowercase().as_str() {
            "ideal" | "idealmetal" | "ideal-metal" | "ideal_metal" => Self::ideal_metal(),
            "plasma" => Self::plasma(need(doc.omega_p_rad_s, "omega_p_rad_s")?)?,
            "drude" => Self::drude(
                need(doc.omega_p_rad_s, "omega_p_rad_s")?,
                need(doc.gamma_rad_s, "gamma_rad_s")?,
            )?,
            "tabulated" => {
                let table = doc
                    .table
                    .clone()
                    .ok_or_else(|| Error::InvalidMaterial("tabulated requires table".into()))?;
                Self::tabulated(table.into_iter().map(|[x, e]| (x, e)).collect())?
            }
            other => {
                return Err(Error::InvalidMaterial(format!(
                    "unknown material kind '{other}'"
                )))
            }
        };
        match (doc.sigma_gauss_inv_s, doc.mean_free_path_m, doc.v_f_m_s) {
            (Some(sigma_gauss), Some(mean_free_path), Some(fermi_velocity)) => {
                model.transport = Some(Transport {
                    sigma_gauss,
                    mean_free_path,
                    fermi_velocity,
                });
            }
            (None, None, None) => {}
            _ => {
                return Err(Error::InvalidMaterial(
                    "transport needs all of sigma_gauss_inv_s, mean_free_path_m, v_F_m_s".into(),
                ))
            }
        }
        Ok(model)
    }
}
