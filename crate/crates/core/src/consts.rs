//! CODATA 2018 constants, SI.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.997_924_58e8;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Riemann zeta(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
}

pub const CODATA_2018: Constants = Constants {
    hbar: HBAR,
    c: C,
    k_b: K_B,
};
