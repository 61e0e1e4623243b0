//! Point estimates that decide whether a run is feasible: the collapse-rate
//! bound, Doppler broadening, thermal velocity and resolvability of the
//! spin-flip pulses.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kinematics::{self, classical_trajectory};
use crate::params::ExperimentParams;
use crate::sequence::PulseSequence;
use crate::spin::SpinBranch;
use crate::wavepacket::wavepacket_width;

/// Published estimates. They only annotate reports and never enter a calculation.
pub mod quoted {
    /// Collapse-rate bound, order of magnitude, s^-1.
    pub const CSL_BOUND: f64 = 1e-14;
    /// Doppler linewidth, Hz.
    pub const DOPPLER_LINEWIDTH: f64 = 0.029;
    /// RMS velocity at 1 mK, m/s.
    pub const THERMAL_VELOCITY: f64 = 0.002;
    /// Zeeman splitting between the flip resonances, Hz.
    pub const ZEEMAN_SPLITTING: f64 = 56e9;
    /// Maximum arm separation, m.
    pub const MAX_SEPARATION: f64 = 100e-9;
    /// Width growth over the flight.
    pub const SPREAD_RATIO: f64 = 10.0;
    /// Typical NV resonance linewidth, Hz.
    pub const NV_LINEWIDTH: f64 = 1e7;
    /// Collapse rate suggested by Adler, s^-1.
    pub const ADLER_LAMBDA: f64 = 1e-9;
}

/// Resolvability passes when the splitting exceeds the pulse bandwidth this many times.
pub const RESOLVABILITY_THRESHOLD: f64 = 10.0;

/// A computed value is flagged when it differs from the quoted one by more than this factor.
pub const DISCREPANCY_FACTOR: f64 = 2.5;

/// Largest collapse rate compatible with keeping coherence: 1 / (2 N^2 t3).
pub fn csl_bound(n_nucleons: f64, t3: f64) -> f64 {
    1.0 / (2.0 * n_nucleons * n_nucleons * t3)
}

/// First-order Doppler width f0 v0 / c.
pub fn doppler_linewidth(f0: f64, v0: f64) -> f64 {
    f0 * v0 / crate::constants::PhysicalConstants::CODATA.light_speed
}

/// Doppler width for a harmonic oscillation of amplitude `z0` at `omega_z`.
pub fn doppler_linewidth_oscillating(f0: f64, z0: f64, omega_z: f64) -> f64 {
    doppler_linewidth(f0, z0 * omega_z)
}

/// RMS velocity sqrt(3 k T / m).
pub fn thermal_velocity(t_cm: f64, mass: f64) -> f64 {
    libm::sqrt(3.0 * crate::constants::PhysicalConstants::CODATA.k_boltzmann * t_cm / mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolvability {
    /// Hz
    pub splitting: f64,
    /// Hz
    pub bandwidth: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Splitting of the two flip resonances at the first pulse,
/// `2 (g mu_B / h) b x_flip`, against the pulse bandwidth `1 / pulse_duration`.
/// `x_flip` is the displacement of either arm from the spin-free path at `t1`.
pub fn zeeman_resolvability(params: &ExperimentParams, seq: &PulseSequence) -> Resolvability {
    let [t1, _, _] = seq.effective_times();
    let plus = classical_trajectory(params, seq, SpinBranch::Plus, 0.0, 0.0).state_at(t1).0;
    let minus = classical_trajectory(params, seq, SpinBranch::Minus, 0.0, 0.0).state_at(t1).0;
    let x_flip = (plus - minus).abs() / 2.0;
    let c = &params.constants;
    let per_tesla = params.g_nv * c.mu_bohr / c.planck();
    let splitting = 2.0 * per_tesla * params.b_gradient.abs() * x_flip;
    let bandwidth = 1.0 / params.pulse_duration;
    let ratio = splitting / bandwidth;
    Resolvability { splitting, bandwidth, ratio, pass: ratio >= RESOLVABILITY_THRESHOLD }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetNote {
    pub quantity: String,
    pub computed: f64,
    pub quoted: f64,
    pub comment: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// s^-1, with the configured nucleon count
    pub csl_bound: f64,
    /// s^-1, with the nucleon count mass / amu
    pub csl_bound_from_mass: f64,
    /// Adler's rate over the bound.
    pub adler_excess: f64,
    /// Hz
    pub doppler_linewidth: f64,
    /// m/s
    pub doppler_velocity: f64,
    /// Doppler width over the NV linewidth.
    pub doppler_to_linewidth: f64,
    /// m/s
    pub thermal_velocity: f64,
    /// Hz
    pub zeeman_splitting: f64,
    /// Hz
    pub pulse_bandwidth: f64,
    pub resolvability_ratio: f64,
    pub resolvable: bool,
    /// Arms recombine in position and momentum at the end of the sequence.
    pub closed: bool,
    /// m
    pub max_separation: f64,
    /// `(A/m)(t3/4)^2`, the half-size closed form, m.
    pub max_separation_printed: f64,
    /// m
    pub max_separation_quoted: f64,
    /// Width at t3 over the initial width.
    pub spread_ratio: f64,
    pub notes: Vec<BudgetNote>,
}

impl BudgetReport {
    pub fn all_pass(&self) -> bool {
        self.resolvable && self.closed
    }
}

fn flag(notes: &mut Vec<BudgetNote>, quantity: &str, computed: f64, quoted: f64, comment: String) {
    let off = if computed > 0.0 && quoted > 0.0 {
        let r = computed / quoted;
        !(1.0 / DISCREPANCY_FACTOR..=DISCREPANCY_FACTOR).contains(&r)
    } else {
        computed != quoted
    };
    if off {
        notes.push(BudgetNote { quantity: quantity.into(), computed, quoted, comment });
    }
}

/// Closure tolerance relative to the maximum separation.
const CLOSURE_TOL: f64 = 1e-9;

pub fn budget_report(params: &ExperimentParams, seq: &PulseSequence) -> Result<BudgetReport> {
    let t3 = seq.end_time();
    let csl = csl_bound(params.n_nucleons, t3);
    let csl_mass = csl_bound(params.mass / params.constants.amu, t3);
    let v_th = thermal_velocity(params.t_cm, params.mass);
    let v_doppler = params.doppler_velocity.unwrap_or(v_th);
    let doppler = doppler_linewidth(params.mw_frequency, v_doppler);
    let zee = zeeman_resolvability(params, seq);
    let dx_max = kinematics::max_separation(params, seq);
    let dx_printed = kinematics::max_separation_as_printed(params);
    let (d, v) = kinematics::closing_residual(params, seq);
    let closed = d.abs() <= CLOSURE_TOL * dx_max && (v * t3).abs() <= CLOSURE_TOL * dx_max;
    let spread_ratio = wavepacket_width(params, t3) / params.sigma0();

    let mut notes = Vec::new();
    flag(&mut notes, "csl_bound", csl, quoted::CSL_BOUND, format!("1/(2 N^2 t3) with N = {:e}", params.n_nucleons));
    flag(
        &mut notes,
        "doppler_linewidth",
        doppler,
        quoted::DOPPLER_LINEWIDTH,
        format!("f0 v0 / c with f0 = {:e} Hz, v0 = {:e} m/s", params.mw_frequency, v_doppler),
    );
    if params.t_cm > 0.0 {
        flag(
            &mut notes,
            "thermal_velocity",
            thermal_velocity(1e-3, params.mass),
            quoted::THERMAL_VELOCITY,
            format!("sqrt(3 k T / m) at 1 mK for m = {:e} kg", params.mass),
        );
    }
    if params.spin_force() != 0.0 {
        flag(
            &mut notes,
            "zeeman_splitting",
            zee.splitting,
            quoted::ZEEMAN_SPLITTING,
            format!("2 (g mu_B / h) b x_flip with b = {:e} T/m", params.b_gradient),
        );
        flag(
            &mut notes,
            "max_separation",
            dx_max,
            quoted::MAX_SEPARATION,
            format!("kinematic 2 (A/m)(t3/4)^2; the half-size closed form gives {:e} m", dx_printed),
        );
    }
    flag(&mut notes, "spread_ratio", spread_ratio, quoted::SPREAD_RATIO, format!("sqrt(1 + (omega t3)^2) at t3 = {:e} s", t3));

    Ok(BudgetReport {
        csl_bound: csl,
        csl_bound_from_mass: csl_mass,
        adler_excess: quoted::ADLER_LAMBDA / csl,
        doppler_linewidth: doppler,
        doppler_velocity: v_doppler,
        doppler_to_linewidth: doppler / quoted::NV_LINEWIDTH,
        thermal_velocity: v_th,
        zeeman_splitting: zee.splitting,
        pulse_bandwidth: zee.bandwidth,
        resolvability_ratio: zee.ratio,
        resolvable: zee.pass,
        closed,
        max_separation: dx_max,
        max_separation_printed: dx_printed,
        max_separation_quoted: quoted::MAX_SEPARATION,
        spread_ratio,
        notes,
    })
}
