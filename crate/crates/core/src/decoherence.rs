//! Momentum-kick dephasing of the spatial superposition.
//!
//! Each decoherence channel is a photon (or gas) kick rate density
//! `gamma(omega)`. A kick of wavenumber `k = omega / c` in a random direction
//! removes a fraction `1 - sinc(k dx)` of the coherence between two arms `dx`
//! apart, so the localization rate is
//!
//! ```text
//! eta(dx) = sum_i int d omega gamma_i(omega) (1 - sinc(omega dx / c))
//! ```
//!
//! and the coherence after a time `t` at fixed separation is `exp(-eta t)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kinematics;
use crate::params::{ConfigMap, ExperimentParams};
use crate::quadrature::{self, QuadOptions};
use crate::sequence::PulseSequence;

/// Default Im[(eps-1)/(eps+2)] for diamond in the thermal infrared. This is a
/// placeholder magnitude, not measured data; supply a table for real estimates.
pub const DEFAULT_RESPONSE_IM: f64 = 1e-3;

/// |(eps-1)/(eps+2)|^2 for eps = 5.7.
pub const DEFAULT_RESPONSE_SCATTER: f64 = 0.372_558_610_217_574_6;

/// Upper limit of the Planck integrals in units of k T / hbar.
const PLANCK_CUTOFF: f64 = 80.0;

/// sin(z)/z with sinc(0) = 1.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        libm::sin(z) / z
    }
}

/// Sphere average `1 - (1/4pi) int dOmega exp(i k n_x dx)` = `1 - sinc(k dx)`.
/// The imaginary part of the average vanishes under n_x -> -n_x.
pub fn angular_factor(k: f64, delta_x: f64) -> f64 {
    let z = k * delta_x;
    if z.abs() < 1e-3 {
        // 1 - sinc(z) without cancellation
        let z2 = z * z;
        z2 / 6.0 - z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0
    } else {
        1.0 - libm::sin(z) / z
    }
}

/// Material response as a function of angular frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Response {
    Constant(f64),
    /// Linear interpolation on strictly increasing `omega` (rad/s); clamped
    /// to the end values outside the table.
    Tabulated { omega: Vec<f64>, value: Vec<f64> },
}

impl Response {
    pub fn at(&self, omega: f64) -> f64 {
        match self {
            Response::Constant(v) => *v,
            Response::Tabulated { omega: xs, value: ys } => interpolate(xs, ys, omega),
        }
    }

    fn validate(&self, channel: &str) -> Result<()> {
        match self {
            Response::Constant(v) if *v >= 0.0 && v.is_finite() => Ok(()),
            Response::Constant(_) => Err(table_error(channel, "response must be finite and >= 0")),
            Response::Tabulated { omega, value } => validate_table(channel, omega, value),
        }
    }
}

fn table_error(channel: &str, reason: &'static str) -> Error {
    Error::SpectralTable { channel: channel.to_string(), reason }
}

fn validate_table(channel: &str, xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(table_error(channel, "need at least two (omega, value) rows of equal length"));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || xs[0] < 0.0 {
        return Err(table_error(channel, "omega must be non-negative and strictly increasing"));
    }
    if ys.iter().any(|y| !(*y >= 0.0) || !y.is_finite()) {
        return Err(table_error(channel, "values must be finite and >= 0"));
    }
    Ok(())
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiativeProcess {
    /// Absorption of the environment field, cross-section (omega/c) 4 pi R^3 Im[chi].
    Absorption,
    /// Thermal emission at the internal temperature, same cross-section.
    Emission,
    /// Rayleigh scattering, cross-section (8 pi/3) (omega/c)^4 R^6 |chi|^2.
    Scattering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Rate density `density[i]` (s^-1 per rad/s) at `omega[i]`, linear in between
    /// and zero outside.
    Tabulated { omega: Vec<f64>, density: Vec<f64> },
    /// Photon flux of a Planck field at `temperature` times a cross-section.
    Blackbody {
        temperature: f64,
        radius: f64,
        response: Response,
        process: RadiativeProcess,
    },
    /// Total kick rate with a single effective wavenumber.
    Collision { rate: f64, kick_wavenumber: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub kind: ChannelKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralRateModel {
    pub channels: Vec<Channel>,
}

impl Channel {
    fn validate(&self) -> Result<()> {
        match &self.kind {
            ChannelKind::Tabulated { omega, density } => validate_table(&self.name, omega, density),
            ChannelKind::Blackbody { temperature, radius, response, .. } => {
                if !(*temperature >= 0.0) || !(*radius > 0.0) {
                    return Err(table_error(&self.name, "temperature must be >= 0 and radius > 0"));
                }
                response.validate(&self.name)
            }
            ChannelKind::Collision { rate, kick_wavenumber } => {
                if *rate >= 0.0 && *kick_wavenumber >= 0.0 {
                    Ok(())
                } else {
                    Err(table_error(&self.name, "collision rate and wavenumber must be >= 0"))
                }
            }
        }
    }

    /// Rate density gamma(omega), s^-1 per rad/s. Collision channels are a
    /// delta function and report 0 here.
    pub fn rate_density(&self, omega: f64, c: &PhysicalConstants) -> f64 {
        match &self.kind {
            ChannelKind::Tabulated { omega: xs, density } => {
                if omega < xs[0] || omega > xs[xs.len() - 1] {
                    0.0
                } else {
                    interpolate(xs, density, omega)
                }
            }
            ChannelKind::Blackbody { temperature, radius, response, process } => {
                blackbody_density(omega, *temperature, *radius, response.at(omega), *process, c)
            }
            ChannelKind::Collision { .. } => 0.0,
        }
    }
}

fn blackbody_density(
    omega: f64,
    temperature: f64,
    radius: f64,
    chi: f64,
    process: RadiativeProcess,
    c: &PhysicalConstants,
) -> f64 {
    if temperature <= 0.0 || omega <= 0.0 {
        return 0.0;
    }
    let x = c.hbar * omega / (c.k_boltzmann * temperature);
    // photon flux per unit omega: c * omega^2 / (pi^2 c^3) / (e^x - 1)
    let flux = omega * omega / (PI * PI * c.light_speed * c.light_speed) / libm::expm1(x);
    let k = omega / c.light_speed;
    let r3 = radius * radius * radius;
    let cross = match process {
        RadiativeProcess::Absorption | RadiativeProcess::Emission => k * 4.0 * PI * r3 * chi,
        RadiativeProcess::Scattering => 8.0 * PI / 3.0 * k * k * k * k * r3 * r3 * chi,
    };
    flux * cross
}

impl SpectralRateModel {
    pub fn new(channels: Vec<Channel>) -> Result<Self> {
        for ch in &channels {
            ch.validate()?;
        }
        Ok(Self { channels })
    }

    /// Every channel scaled by `factor` (>= 0); used for monotonicity checks.
    pub fn scaled(&self, factor: f64) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|ch| {
                let kind = match &ch.kind {
                    ChannelKind::Tabulated { omega, density } => ChannelKind::Tabulated {
                        omega: omega.clone(),
                        density: density.iter().map(|d| d * factor).collect(),
                    },
                    ChannelKind::Blackbody { temperature, radius, response, process } => {
                        let response = match response {
                            Response::Constant(v) => Response::Constant(v * factor),
                            Response::Tabulated { omega, value } => Response::Tabulated {
                                omega: omega.clone(),
                                value: value.iter().map(|v| v * factor).collect(),
                            },
                        };
                        ChannelKind::Blackbody { temperature: *temperature, radius: *radius, response, process: *process }
                    }
                    ChannelKind::Collision { rate, kick_wavenumber } => {
                        ChannelKind::Collision { rate: rate * factor, kick_wavenumber: *kick_wavenumber }
                    }
                };
                Channel { name: ch.name.clone(), kind }
            })
            .collect();
        Self { channels }
    }
}

/// Contribution of one channel to `eta(dx)`; `dx = inf` gives the total kick rate.
pub fn channel_rate(ch: &Channel, delta_x: f64, opts: &QuadOptions) -> Result<f64> {
    let c = PhysicalConstants::CODATA;
    let kernel = |omega: f64| {
        if delta_x.is_infinite() {
            1.0
        } else {
            angular_factor(omega / c.light_speed, delta_x)
        }
    };
    let fail = |error: f64| Error::Quadrature { channel: ch.name.clone(), error };
    match &ch.kind {
        ChannelKind::Collision { rate, kick_wavenumber } => {
            Ok(if delta_x.is_infinite() { *rate } else { rate * angular_factor(*kick_wavenumber, delta_x) })
        }
        ChannelKind::Tabulated { omega, .. } => {
            let mut total = 0.0;
            for w in omega.windows(2) {
                let r = quadrature::integrate(|om| ch.rate_density(om, &c) * kernel(om), w[0], w[1], opts);
                if !r.converged {
                    return Err(fail(r.error));
                }
                total += r.value;
            }
            Ok(total)
        }
        ChannelKind::Blackbody { temperature, .. } => {
            if *temperature <= 0.0 {
                return Ok(0.0);
            }
            let scale = c.k_boltzmann * temperature / c.hbar;
            let r = quadrature::integrate(
                |x| {
                    let om = x * scale;
                    ch.rate_density(om, &c) * kernel(om) * scale
                },
                0.0,
                PLANCK_CUTOFF,
                opts,
            );
            if r.converged {
                Ok(r.value)
            } else {
                Err(fail(r.error))
            }
        }
    }
}

/// Localization rate `eta(dx)`, s^-1.
pub fn localization_rate(model: &SpectralRateModel, delta_x: f64) -> Result<f64> {
    localization_rate_with(model, delta_x, &QuadOptions::default())
}

pub fn localization_rate_with(model: &SpectralRateModel, delta_x: f64, opts: &QuadOptions) -> Result<f64> {
    if delta_x == 0.0 {
        return Ok(0.0);
    }
    model.channels.iter().map(|ch| channel_rate(ch, delta_x, opts)).sum()
}

/// Total kick rate, the `dx -> inf` limit of `eta`.
pub fn total_kick_rate(model: &SpectralRateModel) -> Result<f64> {
    localization_rate(model, f64::INFINITY)
}

/// Coherence left after time `t` at rate `eta`: exp(-eta t).
pub fn visibility(eta: f64, t: f64) -> f64 {
    libm::exp(-eta * t)
}

/// Blackbody decoherence of a dielectric sphere, parametrized by its internal temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackbodyFamily {
    /// m
    pub radius: f64,
    /// K
    pub t_environment: f64,
    /// Im[(eps-1)/(eps+2)]
    pub response: Response,
    /// |(eps-1)/(eps+2)|^2
    pub scatter_response: Response,
    /// s^-1
    pub gas_rate: f64,
    /// rad/m
    pub gas_kick_wavenumber: f64,
}

impl BlackbodyFamily {
    pub fn new(radius: f64, t_environment: f64) -> Self {
        Self {
            radius,
            t_environment,
            response: Response::Constant(DEFAULT_RESPONSE_IM),
            scatter_response: Response::Constant(DEFAULT_RESPONSE_SCATTER),
            gas_rate: 0.0,
            gas_kick_wavenumber: 0.0,
        }
    }

    pub fn from_config(params: &ExperimentParams, config: &ConfigMap) -> Self {
        let mut fam = Self::new(params.effective_radius(), params.t_environment);
        if let Some(v) = config.get("response_im") {
            fam.response = Response::Constant(*v);
        }
        if let Some(v) = config.get("response_scatter") {
            fam.scatter_response = Response::Constant(*v);
        }
        fam.gas_rate = config.get("gas_collision_rate").copied().unwrap_or(0.0);
        fam.gas_kick_wavenumber = config.get("gas_kick_wavenumber").copied().unwrap_or(0.0);
        fam
    }

    pub fn model_at(&self, t_internal: f64) -> Result<SpectralRateModel> {
        let bb = |name: &str, temperature: f64, response: &Response, process| Channel {
            name: name.into(),
            kind: ChannelKind::Blackbody { temperature, radius: self.radius, response: response.clone(), process },
        };
        SpectralRateModel::new(alloc::vec![
            Channel {
                name: "gas collisions".into(),
                kind: ChannelKind::Collision { rate: self.gas_rate, kick_wavenumber: self.gas_kick_wavenumber },
            },
            bb("blackbody scattering", self.t_environment, &self.scatter_response, RadiativeProcess::Scattering),
            bb("blackbody absorption", self.t_environment, &self.response, RadiativeProcess::Absorption),
            bb("thermal emission", t_internal, &self.response, RadiativeProcess::Emission),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilitySurface {
    /// m
    pub delta_x_axis: Vec<f64>,
    /// K
    pub t_int_axis: Vec<f64>,
    /// `visibility[i][j]` at `t_int_axis[i]`, `delta_x_axis[j]`.
    pub visibility: Vec<Vec<f64>>,
    /// s
    pub flight_time: f64,
}

/// One surface entry: exp(-eta(dx; T_int) t).
pub fn visibility_point(family: &BlackbodyFamily, delta_x: f64, t_int: f64, flight_time: f64) -> Result<f64> {
    let eta = localization_rate(&family.model_at(t_int)?, delta_x)?;
    Ok(visibility(eta, flight_time))
}

/// Worst-case (fixed maximal separation) visibility over a grid of separations
/// and internal temperatures.
pub fn visibility_surface(
    family: &BlackbodyFamily,
    delta_x_axis: &[f64],
    t_int_axis: &[f64],
    flight_time: f64,
) -> Result<VisibilitySurface> {
    if delta_x_axis.is_empty() || t_int_axis.is_empty() {
        return Err(Error::OutOfRange { what: "surface axis length", value: 0.0, range: ">= 1" });
    }
    let visibility = t_int_axis
        .iter()
        .map(|&t| {
            let model = family.model_at(t)?;
            delta_x_axis
                .iter()
                .map(|&dx| Ok(super::decoherence::visibility(localization_rate(&model, dx)?, flight_time)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VisibilitySurface {
        delta_x_axis: delta_x_axis.to_vec(),
        t_int_axis: t_int_axis.to_vec(),
        visibility,
        flight_time,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingEstimate {
    /// eta(dx_max) t3, the fixed-separation bound.
    pub worst_case: f64,
    /// int eta(|dx(t)|) dt along the kinematic separation profile.
    pub along_path: f64,
}

/// Dephasing exponent of a run, as the worst-case bound and integrated along
/// the actual separation history. `along_path <= worst_case` whenever eta is
/// monotone in the separation.
pub fn dephasing_along_path(
    model: &SpectralRateModel,
    params: &ExperimentParams,
    seq: &PulseSequence,
) -> Result<DephasingEstimate> {
    let dx_max = kinematics::max_separation(params, seq);
    let worst_case = localization_rate(model, dx_max)? * seq.end_time();
    let opts = QuadOptions { rel_tol: 1e-8, ..Default::default() };
    let mut along_path = 0.0;
    let mut failure = None;
    for seg in seq.segments() {
        let r = quadrature::integrate(
            |t| {
                let dx = kinematics::separation_at(params, seq, t).abs();
                match localization_rate(model, dx) {
                    Ok(eta) => eta,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            seg.start,
            seg.start + seg.duration,
            &opts,
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        if !r.converged {
            return Err(Error::Quadrature { channel: "separation history".into(), error: r.error });
        }
        along_path += r.value;
    }
    Ok(DephasingEstimate { worst_case, along_path })
}

/// CSL dephasing rate for an N-nucleon body: N^2 lambda once the separation
/// exceeds r_csl, suppressed as (dx/r_csl)^2 below it.
pub fn csl_dephasing_rate(lambda_csl: f64, n_nucleons: f64, delta_x: f64, r_csl: f64) -> f64 {
    let saturated = lambda_csl * n_nucleons * n_nucleons;
    if delta_x >= r_csl {
        saturated
    } else {
        let r = delta_x / r_csl;
        saturated * r * r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::paper_params;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn default_family() -> BlackbodyFamily {
        BlackbodyFamily::new(1e-7, 300.0)
    }

    #[test]
    fn angular_factor_values() {
        assert_eq!(angular_factor(1e7, 0.0), 0.0);
        assert!((angular_factor(PI, 1.0) - 1.0).abs() < 1e-15);
        // z^2/6 up to the z^4/120 term
        assert!((angular_factor(0.1, 1.0) - 0.01 / 6.0).abs() <= 1.01e-4 / 120.0);
        let z: f64 = 0.01;
        assert!((angular_factor(z, 1.0) / (z * z / 6.0) - 1.0).abs() < 0.01);
        // both sides of the series switch against the Taylor form
        for z in [0.999_999e-3, 1.000_001e-3] {
            let series = z * z / 6.0 - z * z * z * z / 120.0;
            assert!((angular_factor(z, 1.0) / series - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn angular_factor_against_sphere_sampling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 4_000_000;
        let dirs: std::vec::Vec<f64> = (0..n)
            .map(|_| {
                let v: [f64; 3] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
                v[0] / libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            })
            .collect();
        for z in [0.3, 1.0, 2.5, 4.5, 9.0] {
            let (re, im) = dirs.iter().fold((0.0, 0.0), |(r, i), nx| (r + libm::cos(z * nx), i + libm::sin(z * nx)));
            let mc = 1.0 - re / n as f64;
            assert!((mc - angular_factor(z, 1.0)).abs() < 1e-3, "z={z}");
            assert!((im / n as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn angular_factor_bounds() {
        for i in 1..2000 {
            let z = i as f64 * 0.05;
            let f = angular_factor(z, 1.0);
            assert!((0.0..=2.0).contains(&f));
            if z > 1.0 {
                assert!((f - 1.0).abs() <= 1.0 / z);
            }
        }
    }

    #[test]
    fn zero_separation_zero_rate() {
        let m = default_family().model_at(500.0).unwrap();
        assert_eq!(localization_rate(&m, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn narrow_bin_reduces_to_delta() {
        let (w0, gamma, half) = (3e13, 1e4, 1e9);
        let ch = Channel {
            name: "spike".into(),
            kind: ChannelKind::Tabulated {
                omega: alloc::vec![w0 - half, w0, w0 + half],
                density: alloc::vec![0.0, gamma / half, 0.0],
            },
        };
        let m = SpectralRateModel::new(alloc::vec![ch]).unwrap();
        let c = PhysicalConstants::CODATA;
        for dx in [1e-7, 1e-6, 1e-5] {
            let eta = localization_rate(&m, dx).unwrap();
            let exact = gamma * angular_factor(w0 / c.light_speed, dx);
            assert!((eta - exact).abs() < 1e-6 * exact.max(gamma * 1e-6), "{eta} {exact}");
        }
        assert!((total_kick_rate(&m).unwrap() - gamma).abs() < 1e-9 * gamma);
    }

    #[test]
    fn large_separation_limit() {
        let m = default_family().model_at(600.0).unwrap();
        let total = total_kick_rate(&m).unwrap();
        let far = localization_rate(&m, 1e-3).unwrap();
        assert!((far - total).abs() < 1e-3 * total, "{far} {total}");
    }

    #[test]
    fn emission_rate_closed_form() {
        // Small-separation limit: eta = 4 R^3 chi dx^2 / (6 pi c^5) int omega^5/(e^x-1)
        // with int = (kT/hbar)^6 Gamma(6) zeta(6) = 120 pi^6/945 (kT/hbar)^6
        let c = PhysicalConstants::CODATA;
        let (r, chi, t, dx) = (1e-7, 1e-3, 700.0, 1e-9);
        let ch = Channel {
            name: "emission".into(),
            kind: ChannelKind::Blackbody { temperature: t, radius: r, response: Response::Constant(chi), process: RadiativeProcess::Emission },
        };
        let m = SpectralRateModel::new(alloc::vec![ch]).unwrap();
        let w = c.k_boltzmann * t / c.hbar;
        let moment = 120.0 * PI.powi(6) / 945.0 * w.powi(6);
        let expected = 4.0 * r.powi(3) * chi / (PI * c.light_speed.powi(3)) * dx * dx / (6.0 * c.light_speed * c.light_speed) * moment;
        let eta = localization_rate(&m, dx).unwrap();
        assert!((eta / expected - 1.0).abs() < 1e-4, "{eta} {expected}");
    }

    #[test]
    fn additive_and_monotone() {
        let fam = default_family();
        let m = fam.model_at(400.0).unwrap();
        let dx = 5e-8;
        let sum: f64 = m.channels.iter().map(|ch| {
            localization_rate(&SpectralRateModel::new(alloc::vec![ch.clone()]).unwrap(), dx).unwrap()
        }).sum();
        let whole = localization_rate(&m, dx).unwrap();
        assert!((whole - sum).abs() < 1e-12 * whole);
        assert!(localization_rate(&m.scaled(1.5), dx).unwrap() >= whole);
    }

    #[test]
    fn refined_quadrature_agrees() {
        let m = default_family().model_at(500.0).unwrap();
        for dx in [1e-8, 1e-7, 1e-6] {
            let a = localization_rate_with(&m, dx, &QuadOptions { rel_tol: 1e-8, ..Default::default() }).unwrap();
            let b = localization_rate_with(&m, dx, &QuadOptions { rel_tol: 1e-12, ..Default::default() }).unwrap();
            assert!((a - b).abs() <= 1e-6 * b);
        }
    }

    #[test]
    fn visibility_values() {
        assert_eq!(visibility(0.0, 1.0), 1.0);
        assert!((visibility(core::f64::consts::LN_2, 1.0) - 0.5).abs() < 1e-15);
        assert!((visibility(1e3, 1e-4) - libm::exp(-0.1)).abs() < 1e-15);
        assert!((visibility(1e3, 1e-4) - 0.905).abs() < 1e-3);
    }

    #[test]
    fn zero_rate_surface_is_all_ones() {
        let mut fam = default_family();
        fam.response = Response::Constant(0.0);
        fam.scatter_response = Response::Constant(0.0);
        let s = visibility_surface(&fam, &[1e-8, 1e-7], &[10.0, 1000.0], 1e-4).unwrap();
        assert!(s.visibility.iter().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn surface_monotone_and_pointwise() {
        let fam = default_family();
        let dx: std::vec::Vec<f64> = (0..8).map(|i| 1e-8 * libm::pow(10.0, i as f64 * 2.0 / 7.0)).collect();
        let t: std::vec::Vec<f64> = (0..6).map(|i| 50.0 + 300.0 * i as f64).collect();
        let s = visibility_surface(&fam, &dx, &t, 1e-4).unwrap();
        for (i, row) in s.visibility.iter().enumerate() {
            for j in 0..row.len() {
                assert!((0.0..=1.0).contains(&row[j]));
                if j > 0 {
                    assert!(row[j] <= row[j - 1]);
                }
                if i > 0 {
                    assert!(row[j] <= s.visibility[i - 1][j]);
                }
                assert_eq!(row[j], visibility_point(&fam, dx[j], t[i], 1e-4).unwrap());
            }
        }
        assert!(s.visibility[0][0] > 0.9);
    }

    #[test]
    fn path_integral_below_worst_case() {
        let p = paper_params();
        let seq = PulseSequence::balanced(p.t3).unwrap();
        let m = default_family().model_at(1500.0).unwrap();
        let est = dephasing_along_path(&m, &p, &seq).unwrap();
        assert!(est.along_path > 0.0);
        assert!(est.along_path < est.worst_case);
    }

    #[test]
    fn invalid_tables_rejected() {
        let bad = Channel {
            name: "bad".into(),
            kind: ChannelKind::Tabulated { omega: alloc::vec![2.0, 1.0], density: alloc::vec![1.0, 1.0] },
        };
        assert!(matches!(SpectralRateModel::new(alloc::vec![bad]), Err(Error::SpectralTable { .. })));
        let neg = Channel {
            name: "neg".into(),
            kind: ChannelKind::Tabulated { omega: alloc::vec![1.0, 2.0], density: alloc::vec![1.0, -1.0] },
        };
        assert!(SpectralRateModel::new(alloc::vec![neg]).is_err());
    }

    #[test]
    fn csl_rates() {
        assert!((csl_dephasing_rate(5e-15, 1e9, 1e-7, 1e-7) - 5e3).abs() < 1e-9);
        assert_eq!(csl_dephasing_rate(0.0, 1e9, 1e-7, 1e-7), 0.0);
        assert!((csl_dephasing_rate(5e-15, 1e9, 5e-8, 1e-7) - 1.25e3).abs() < 1e-9);
        // rate t3 = 1/2 at the bound lambda = 1/(2 N^2 t3)
        let (n, t3) = (1e9, 1e-4);
        let lambda = 1.0 / (2.0 * n * n * t3);
        assert!((csl_dephasing_rate(lambda, n, 1e-7, 1e-7) * t3 - 0.5).abs() < 1e-12);
    }
}
