//! Experiment parameters and the flat configuration key schema.
//!
//! Every key is SI. The same flat map carries keys consumed by other modules
//! (pulse timing, decoherence model, collapse-model inputs); they are listed in
//! [`CONFIG_KEYS`] so that a typo anywhere is caught once, here.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::constants::{PhysicalConstants, DEFAULT_G_NV};
use crate::error::{Error, Result};

/// Flat numeric configuration, keyed by the names in [`CONFIG_KEYS`].
pub type ConfigMap = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyUse {
    /// Needed by [`build_params`].
    Mandatory,
    /// Optional; the default is described in the key's doc string.
    Optional,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub usage: KeyUse,
    pub doc: &'static str,
}

const fn key(name: &'static str, unit: &'static str, usage: KeyUse, doc: &'static str) -> KeySpec {
    KeySpec { name, unit, usage, doc }
}

use KeyUse::{Mandatory, Optional};

pub const CONFIG_KEYS: &[KeySpec] = &[
    key("mass", "kg", Optional, "particle mass; derived from radius and density when absent"),
    key("radius", "m", Optional, "sphere radius; also sets the blackbody cross-sections"),
    key("density", "kg/m^3", Optional, "mass density used with radius (diamond 3500 when only radius is given)"),
    key("b_gradient", "T/m", Mandatory, "magnetic field gradient along the trap axis"),
    key("theta", "rad", Mandatory, "tilt of the trap axis from the vertical, in [0, pi/2]"),
    key("t3", "s", Mandatory, "total free-flight time"),
    key("trap_omega", "rad/s", Mandatory, "angular frequency of the trap before release"),
    key("g_nv", "1", Optional, "NV Landé factor, default 2.0028"),
    key("g_earth", "m/s^2", Optional, "free-fall acceleration, default 9.80665"),
    key("t_internal", "K", Mandatory, "internal (bulk) temperature of the particle"),
    key("t_environment", "K", Mandatory, "temperature of the surrounding blackbody field"),
    key("t_cm", "K", Mandatory, "centre-of-mass temperature in the trap"),
    key("mw_frequency", "Hz", Mandatory, "microwave carrier frequency f0"),
    key("pulse_duration", "s", Mandatory, "duration of one microwave pulse"),
    key("n_nucleons", "1", Optional, "nucleon count for the collapse bound, default mass/amu"),
    key("t1", "s", Optional, "first flip time, default t3/4"),
    key("t2", "s", Optional, "second flip time, default 3 t3/4"),
    key("jitter_t1", "s", Optional, "timing offset added to t1, default 0"),
    key("jitter_t2", "s", Optional, "timing offset added to t2, default 0"),
    key("jitter_t3", "s", Optional, "timing offset added to t3, default 0"),
    key("doppler_velocity", "m/s", Optional, "velocity amplitude for the Doppler estimate, default thermal rms velocity"),
    key("response_im", "1", Optional, "Im[(eps-1)/(eps+2)] of the particle, default 1e-3"),
    key("response_scatter", "1", Optional, "|(eps-1)/(eps+2)|^2 for Rayleigh scattering, default 0.3726 (eps = 5.7)"),
    key("gas_collision_rate", "1/s", Optional, "total residual-gas collision rate, default 0"),
    key("gas_kick_wavenumber", "rad/m", Optional, "effective momentum-kick wavenumber of gas collisions"),
    key("lambda_csl", "1/s", Optional, "CSL collapse rate for the dephasing-rate estimate"),
    key("r_csl", "m", Optional, "CSL localization length, default 1e-7"),
    key("n_nv", "1", Optional, "number of NV pseudo-spins for collective runs, default 1"),
    key("n_samples", "1", Optional, "thermal ensemble size, default 1000"),
];

pub fn key_spec(name: &str) -> Option<&'static KeySpec> {
    CONFIG_KEYS.iter().find(|k| k.name == name)
}

/// Rejects keys that are not part of [`CONFIG_KEYS`].
pub fn check_known_keys(config: &ConfigMap) -> Result<()> {
    match config.keys().find(|k| key_spec(k).is_none()) {
        Some(k) => Err(Error::UnknownKey(k.clone())),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// kg
    pub mass: f64,
    /// m, when known.
    pub radius: Option<f64>,
    /// kg/m^3, when known.
    pub density: Option<f64>,
    /// T/m
    pub b_gradient: f64,
    /// rad
    pub theta: f64,
    /// s
    pub t3: f64,
    /// rad/s
    pub trap_omega: f64,
    pub g_nv: f64,
    /// m/s^2
    pub g_earth: f64,
    /// K
    pub t_internal: f64,
    /// K
    pub t_environment: f64,
    /// K
    pub t_cm: f64,
    /// Hz
    pub mw_frequency: f64,
    /// s
    pub pulse_duration: f64,
    pub n_nucleons: f64,
    /// m/s; `None` means use the thermal rms velocity.
    pub doppler_velocity: Option<f64>,
    pub constants: PhysicalConstants,
}

fn get(config: &ConfigMap, name: &'static str) -> Option<f64> {
    config.get(name).copied()
}

fn require(config: &ConfigMap, name: &'static str) -> Result<f64> {
    get(config, name).ok_or(Error::MissingKey(name))
}

fn invalid(key: &'static str, reason: impl ToString) -> Error {
    Error::InvalidValue { key, reason: reason.to_string() }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, "not a finite number"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if finite(name, v)? > 0.0 {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be > 0, got {v:e}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<f64> {
    if finite(name, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be >= 0, got {v:e}")))
    }
}

/// Mass of a homogeneous sphere.
pub fn sphere_mass(radius: f64, density: f64) -> f64 {
    4.0 / 3.0 * PI * radius * radius * radius * density
}

/// Validates a flat configuration map into [`ExperimentParams`].
///
/// An explicit `mass` wins over `radius`/`density`, but if all three are
/// present they must agree to 1e-12 relative.
pub fn build_params(config: &ConfigMap) -> Result<ExperimentParams> {
    check_known_keys(config)?;
    let constants = PhysicalConstants::CODATA;

    let radius = get(config, "radius").map(|r| positive("radius", r)).transpose()?;
    let density = get(config, "density").map(|d| positive("density", d)).transpose()?;
    let derived = match (radius, density) {
        (Some(r), Some(d)) => Some(sphere_mass(r, d)),
        _ => None,
    };
    let mass = match (get(config, "mass"), derived) {
        (Some(m), Some(d)) => {
            let m = positive("mass", m)?;
            if ((m - d) / d).abs() > 1e-12 {
                return Err(Error::InconsistentMass { mass: m, derived: d });
            }
            m
        }
        (Some(m), None) => positive("mass", m)?,
        (None, Some(d)) => d,
        (None, None) => return Err(Error::MissingKey("mass")),
    };

    let theta = finite("theta", require(config, "theta")?)?;
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(invalid("theta", format!("must lie in [0, pi/2], got {theta}")));
    }
    let n_nucleons = match get(config, "n_nucleons") {
        Some(n) => {
            if finite("n_nucleons", n)? < 1.0 {
                return Err(invalid("n_nucleons", "must be >= 1"));
            }
            n
        }
        None => mass / constants.amu,
    };

    Ok(ExperimentParams {
        mass,
        radius,
        density,
        b_gradient: finite("b_gradient", require(config, "b_gradient")?)?,
        theta,
        t3: positive("t3", require(config, "t3")?)?,
        trap_omega: positive("trap_omega", require(config, "trap_omega")?)?,
        g_nv: non_negative("g_nv", get(config, "g_nv").unwrap_or(DEFAULT_G_NV))?,
        g_earth: non_negative("g_earth", get(config, "g_earth").unwrap_or(constants.g_earth))?,
        t_internal: non_negative("t_internal", require(config, "t_internal")?)?,
        t_environment: non_negative("t_environment", require(config, "t_environment")?)?,
        t_cm: non_negative("t_cm", require(config, "t_cm")?)?,
        mw_frequency: positive("mw_frequency", require(config, "mw_frequency")?)?,
        pulse_duration: positive("pulse_duration", require(config, "pulse_duration")?)?,
        n_nucleons,
        doppler_velocity: get(config, "doppler_velocity")
            .map(|v| non_negative("doppler_velocity", v))
            .transpose()?,
        constants,
    })
}

impl ExperimentParams {
    /// Spin force magnitude A = g_nv mu_B dB/dx, N. Signed with the gradient.
    pub fn spin_force(&self) -> f64 {
        self.g_nv * self.constants.mu_bohr * self.b_gradient
    }

    /// Gravity component along the trap axis C = m g cos(theta), N.
    pub fn gravity_force(&self) -> f64 {
        self.mass * self.g_earth * libm::cos(self.theta)
    }

    /// Ground-state width of the trap, sigma0 = sqrt(hbar / (2 m omega)), m.
    pub fn sigma0(&self) -> f64 {
        libm::sqrt(self.constants.hbar / (2.0 * self.mass * self.trap_omega))
    }

    /// Radius used for radiative cross-sections: the configured one, else the
    /// sphere radius implied by the mass at the configured (or diamond) density.
    pub fn effective_radius(&self) -> f64 {
        self.radius.unwrap_or_else(|| {
            let rho = self.density.unwrap_or(crate::constants::DIAMOND_DENSITY);
            libm::cbrt(3.0 * self.mass / (4.0 * PI * rho))
        })
    }

    /// Copy with the spin force magnitude set to `a` (N), by rescaling the gradient.
    pub fn with_spin_force(mut self, a: f64) -> Self {
        self.b_gradient = a / (self.g_nv * self.constants.mu_bohr);
        self
    }

    /// Sets a named numeric field; used by parameter sweeps.
    pub fn set_field(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "mass" => self.mass = positive("mass", value)?,
            "radius" => self.radius = Some(positive("radius", value)?),
            "density" => self.density = Some(positive("density", value)?),
            "b_gradient" => self.b_gradient = finite("b_gradient", value)?,
            "theta" => {
                if !(0.0..=FRAC_PI_2).contains(&value) {
                    return Err(invalid("theta", "must lie in [0, pi/2]"));
                }
                self.theta = value
            }
            "t3" => self.t3 = positive("t3", value)?,
            "trap_omega" => self.trap_omega = positive("trap_omega", value)?,
            "g_nv" => self.g_nv = non_negative("g_nv", value)?,
            "g_earth" => self.g_earth = non_negative("g_earth", value)?,
            "t_internal" => self.t_internal = non_negative("t_internal", value)?,
            "t_environment" => self.t_environment = non_negative("t_environment", value)?,
            "t_cm" => self.t_cm = non_negative("t_cm", value)?,
            "mw_frequency" => self.mw_frequency = positive("mw_frequency", value)?,
            "pulse_duration" => self.pulse_duration = positive("pulse_duration", value)?,
            "n_nucleons" => self.n_nucleons = positive("n_nucleons", value)?,
            "doppler_velocity" => self.doppler_velocity = Some(non_negative("doppler_velocity", value)?),
            other => return Err(Error::UnknownKey(other.into())),
        }
        Ok(())
    }
}

/// Names accepted by [`ExperimentParams::set_field`].
pub const PARAM_FIELDS: &[&str] = &[
    "mass", "radius", "density", "b_gradient", "theta", "t3", "trap_omega", "g_nv", "g_earth",
    "t_internal", "t_environment", "t_cm", "mw_frequency", "pulse_duration", "n_nucleons",
    "doppler_velocity",
];

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn paper_config() -> ConfigMap {
        [
            ("mass", 1.25e-17),
            ("b_gradient", 1e7),
            ("theta", 0.0),
            ("t3", 1e-4),
            ("trap_omega", 1e5),
            ("t_internal", 400.0),
            ("t_environment", 300.0),
            ("t_cm", 1e-3),
            ("mw_frequency", 2.87e9),
            ("pulse_duration", 1e-8),
        ]
        .into_iter()
        .map(|(k, v)| (String::from(k), v))
        .collect()
    }

    pub fn paper_params() -> ExperimentParams {
        build_params(&paper_config()).unwrap()
    }
}
