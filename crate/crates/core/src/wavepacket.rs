//! Spin-conditioned Gaussian wavepackets and their overlap.
//!
//! A branch is written as `env_t(x - c) exp(i (p (x - c)) / hbar + i phi)`,
//! where `env_t` is the freely spread ground state of the trap and `phi` the
//! accumulated action phase. Linear potentials move `c` and `p` classically
//! and add the classical action to `phi`; they never change the envelope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ExperimentParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBranchState {
    /// m
    pub center: f64,
    /// kg m/s
    pub momentum: f64,
    /// Width of the initial trap ground state, m.
    pub sigma0: f64,
    /// Time entering the free-spreading law, s.
    pub spread_time: f64,
    /// Accumulated semiclassical phase, rad.
    pub action_phase: f64,
}

impl GaussianBranchState {
    /// Coherent state of the trap centred at `(x0, p0)`.
    pub fn coherent(params: &ExperimentParams, x0: f64, p0: f64) -> Self {
        Self {
            center: x0,
            momentum: p0,
            sigma0: params.sigma0(),
            spread_time: 0.0,
            action_phase: 0.0,
        }
    }

    /// Evolves under a constant force, adding `(1/hbar) int (p^2/2m + F x) dt`.
    pub fn advance(&self, force: f64, duration: f64, mass: f64, hbar: f64) -> Self {
        let (x, p, tau) = (self.center, self.momentum, duration);
        let kinetic = (p * p * tau + p * force * tau * tau + force * force * tau * tau * tau / 3.0) / (2.0 * mass);
        let potential = force * (x * tau + p * tau * tau / (2.0 * mass) + force * tau * tau * tau / (6.0 * mass));
        let (center, momentum) = crate::kinematics::advance(x, p, mass, force, tau);
        Self {
            center,
            momentum,
            sigma0: self.sigma0,
            spread_time: self.spread_time + tau,
            action_phase: self.action_phase + (kinetic + potential) / hbar,
        }
    }
}

/// Dimensionless spreading clock hbar t / (2 m sigma0^2).
pub fn spread_parameter(sigma0: f64, mass: f64, hbar: f64, t: f64) -> f64 {
    hbar * t / (2.0 * mass * sigma0 * sigma0)
}

/// Free-Gaussian width sigma(t) = sigma0 sqrt(1 + (hbar t / (2 m sigma0^2))^2).
///
/// With sigma0 = sqrt(hbar / (2 m omega)) this is sigma0 sqrt(1 + (omega t)^2).
/// The supplement prints a different denominator, 4 sigma0^2 (1 + (omega t)^2 / 16);
/// the grid oracle singles out the law used here.
pub fn wavepacket_width(params: &ExperimentParams, spread_time: f64) -> f64 {
    let s0 = params.sigma0();
    let tau = spread_parameter(s0, params.mass, params.constants.hbar, spread_time);
    s0 * libm::sqrt(1.0 + tau * tau)
}

/// Two spin-conditioned arms with their spin amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeState {
    pub plus_branch: GaussianBranchState,
    pub minus_branch: GaussianBranchState,
    /// `(re, im)` of the `|+1>` and `|-1>` amplitudes.
    pub amplitudes: [(f64, f64); 2],
    pub mass: f64,
    pub hbar: f64,
}

/// Log-modulus and (unwrapped) argument of an overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapParts {
    pub log_modulus: f64,
    pub phase: f64,
}

impl OverlapParts {
    pub fn modulus(&self) -> f64 {
        libm::exp(self.log_modulus)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus(), self.phase)
    }
}

impl CompositeState {
    /// `(|+1> + |-1>)/sqrt(2)` times the coherent state at `(x0, p0)`.
    pub fn released(params: &ExperimentParams, x0: f64, p0: f64) -> Self {
        let branch = GaussianBranchState::coherent(params, x0, p0);
        let a = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            plus_branch: branch,
            minus_branch: branch,
            amplitudes: [(a, 0.0), (a, 0.0)],
            mass: params.mass,
            hbar: params.constants.hbar,
        }
    }

    pub fn amplitude_norm(&self) -> f64 {
        self.amplitudes.iter().map(|(re, im)| re * re + im * im).sum()
    }

    /// `<psi_minus | psi_plus>` split into log-modulus and unwrapped phase.
    ///
    /// Both arms share the complex width exp(-(x-c)^2 / (4 sigma0^2 (1 + i tau))).
    /// With d = c+ - c-, q = p+ - p-, P = (p+ + p-)/2 and sigma_t the spread width:
    ///
    /// ```text
    /// ln|<->| = -d^2 / (8 sigma_t^2) - sigma_t^2 k^2 / 2,   k = q/hbar - tau d / (2 sigma_t^2)
    /// arg     = phi+ - phi- - P d / hbar
    /// ```
    ///
    /// The `tau d` term is the position-momentum correlation of a spread packet;
    /// it vanishes at `spread_time = 0` or for coincident centres.
    pub fn overlap_parts(&self) -> Result<OverlapParts> {
        let (a, b) = (&self.plus_branch, &self.minus_branch);
        if a.sigma0 != b.sigma0 || a.spread_time != b.spread_time {
            return Err(Error::MismatchedBranches);
        }
        let tau = spread_parameter(a.sigma0, self.mass, self.hbar, a.spread_time);
        let var_t = a.sigma0 * a.sigma0 * (1.0 + tau * tau);
        let d = a.center - b.center;
        let q = a.momentum - b.momentum;
        let mean_p = 0.5 * (a.momentum + b.momentum);
        let k = q / self.hbar - tau * d / (2.0 * var_t);
        Ok(OverlapParts {
            log_modulus: -d * d / (8.0 * var_t) - var_t * k * k / 2.0,
            phase: a.action_phase - b.action_phase - mean_p * d / self.hbar,
        })
    }
}

/// `<psi_minus | psi_plus>` of the motional states.
///
/// For a closed balanced run the modulus is 1 and the argument is `-phi_g`.
pub fn branch_overlap(state: &CompositeState) -> Result<Complex64> {
    Ok(state.overlap_parts()?.to_complex())
}

/// Interferometer phase `arg <psi_plus | psi_minus>`, unwrapped. Equals `+phi_g`
/// for a closed balanced run.
pub fn relative_phase(state: &CompositeState) -> Result<f64> {
    Ok(-state.overlap_parts()?.phase)
}
