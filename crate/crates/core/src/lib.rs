//! Thermal Casimir free energy between two thick parallel metal plates.
//!
//! The free energy per unit area is assembled from the Lifshitz Matsubara sum
//! with one of two interchangeable pairs of reflection coefficients: the
//! permittivity-based (dielectric) pair or the Leontovich surface-impedance
//! pair. On top of the engine sit the thermodynamic checks (entropy, Nernst
//! limit, thermal correction, pressure) and the real-frequency mode machinery
//! used to cross-validate the renormalized mode sum.
//!
//! Public inputs and outputs are SI (m, K, rad/s, J/m²). Internally every
//! integrand is written in the dimensionless variables `y = 2aq` and
//! `zeta = 2a·xi/c`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consts;
pub mod engine;
pub mod error;
pub mod materials;
pub mod modes;
pub mod quadrature;
pub mod reflection;
pub mod system;
pub mod thermo;

pub use engine::{free_energy, matsubara_term, zero_t_energy, FreeEnergyResult, QuadratureSpec};
pub use error::{Error, Result};
pub use materials::{MaterialKind, MaterialModel, Regime, SkinRegime, Transport};
pub use reflection::{CoefficientFamily, FamilyKind, Polarization};
pub use system::{matsubara_frequency, to_dimensionless, DimensionlessPoint, PlateSystem};
