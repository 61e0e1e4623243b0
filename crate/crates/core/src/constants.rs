//! CODATA 2018 constants in SI units.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_boltzmann: f64,
    /// Bohr magneton, J/T.
    pub mu_bohr: f64,
    /// Speed of light, m/s.
    pub light_speed: f64,
    /// Standard gravity, m/s^2.
    pub g_earth: f64,
    /// Atomic mass unit, kg.
    pub amu: f64,
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        hbar: 1.054_571_817e-34,
        k_boltzmann: 1.380_649e-23,
        mu_bohr: 9.274_010_078_3e-24,
        light_speed: 299_792_458.0,
        g_earth: 9.806_65,
        amu: 1.660_539_066_60e-27,
    };

    /// Planck constant h = 2 pi hbar, J s.
    pub fn planck(&self) -> f64 {
        2.0 * core::f64::consts::PI * self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Landé factor used when the configuration does not set `g_nv`.
pub const DEFAULT_G_NV: f64 = 2.0028;

/// Diamond mass density, kg/m^3.
pub const DIAMOND_DENSITY: f64 = 3500.0;
