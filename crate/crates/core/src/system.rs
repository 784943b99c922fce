//! Plate geometry, temperature, Matsubara frequencies and the dimensionless
//! variables shared by the integrands.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::consts::{C, HBAR, K_B};
use crate::error::{Error, Result};

/// Two identical thick plates separated by a vacuum gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateSystem {
    separation: f64,
    temperature: f64,
}

impl PlateSystem {
    /// `separation` in meters (> 0), `temperature` in kelvin (>= 0).
    pub fn new(separation: f64, temperature: f64) -> Result<Self> {
        if !(separation.is_finite() && separation > 0.0) {
            return Err(Error::InvalidInput(format!(
                "separation must be positive, got {separation:e} m"
            )));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "temperature must be non-negative, got {temperature} K"
            )));
        }
        Ok(Self {
            separation,
            temperature,
        })
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.separation, temperature)
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(separation, self.temperature)
    }

    /// `zeta_l = 2a·xi_l/c`.
    pub fn zeta(&self, l: u64) -> f64 {
        2.0 * self.separation * matsubara_frequency(l, self.temperature) / C
    }

    /// Spacing of consecutive `zeta_l`.
    pub fn zeta_step(&self) -> f64 {
        self.zeta(1)
    }

    /// Converts `∫ k dk` over transverse momentum into `∫ y dy`, times
    /// `k_B T / 2π`: the factor in front of one Matsubara term.
    pub fn term_prefactor(&self) -> f64 {
        K_B * self.temperature / (8.0 * PI * self.separation * self.separation)
    }
}

/// `xi_l = 2π k_B T l / ħ` in rad/s. Exactly zero for `l = 0`.
pub fn matsubara_frequency(l: u64, temperature: f64) -> f64 {
    debug_assert!(temperature >= 0.0);
    if l == 0 {
        return 0.0;
    }
    l as f64 * (2.0 * PI * K_B * temperature / HBAR)
}

/// A point of the Lifshitz integrand in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessPoint {
    /// `2a·q_l`
    pub y: f64,
    /// `2a·xi_l/c`
    pub zeta: f64,
    pub matsubara_index: u64,
}

pub fn to_dimensionless(sys: &PlateSystem, l: u64, k_perp: f64) -> DimensionlessPoint {
    debug_assert!(k_perp >= 0.0);
    let zeta = sys.zeta(l);
    let kt = 2.0 * sys.separation * k_perp;
    DimensionlessPoint {
        y: kt.hypot(zeta),
        zeta,
        matsubara_index: l,
    }
}

/// Inverse of [`to_dimensionless`]: the transverse momentum in 1/m.
pub fn from_dimensionless(sys: &PlateSystem, point: &DimensionlessPoint) -> f64 {
    let y = point.y.max(point.zeta);
    // (y - zeta)(y + zeta) keeps the difference accurate when k_perp is small
    ((y - point.zeta) * (y + point.zeta)).sqrt() / (2.0 * sys.separation)
}
