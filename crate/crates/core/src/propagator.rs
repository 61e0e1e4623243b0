//! Exact propagators for linear potentials, kept in normal-ordered form
//!
//! ```text
//! G = exp(i phase) exp(i kick x / hbar) exp(-i shift p / hbar) exp(-i time p^2 / (2 m hbar))
//! ```
//!
//! The set is closed under multiplication, so a whole pulse sequence composes
//! into a single element without touching a wavefunction.

use crate::params::ExperimentParams;
use crate::sequence::PulseSequence;
use crate::spin::SpinForce;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPropagator {
    /// rad
    pub phase: f64,
    /// kg m/s
    pub kick: f64,
    /// m
    pub shift: f64,
    /// s
    pub time: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl LinearPropagator {
    pub fn identity(mass: f64, hbar: f64) -> Self {
        Self { phase: 0.0, kick: 0.0, shift: 0.0, time: 0.0, mass, hbar }
    }

    /// exp(-i tau (p^2/2m - F x) / hbar)
    pub fn segment(force: f64, tau: f64, mass: f64, hbar: f64) -> Self {
        Self {
            phase: -force * force * tau * tau * tau / (6.0 * mass * hbar),
            kick: force * tau,
            shift: force * tau * tau / (2.0 * mass),
            time: tau,
            mass,
            hbar,
        }
    }

    /// `later * self`: apply `self` first, then `later`.
    pub fn then(&self, later: &Self) -> Self {
        let (m, h) = (self.mass, self.hbar);
        Self {
            phase: self.phase + later.phase
                - later.time * self.kick * self.kick / (2.0 * m * h)
                - self.kick * later.shift / h,
            kick: self.kick + later.kick,
            shift: self.shift + later.shift + later.time * self.kick / m,
            time: self.time + later.time,
            mass: m,
            hbar: h,
        }
    }

    /// Maps a Gaussian state written as `env(x - c) exp(i (p (x - c) + S) / hbar)`
    /// to the same form; returns `(c, p, S)` after the evolution. The envelope
    /// itself only sees the free spreading over `time`.
    pub fn apply(&self, center: f64, momentum: f64, action: f64) -> (f64, f64, f64) {
        let c = center + momentum * self.time / self.mass;
        let s = action + momentum * momentum * self.time / (2.0 * self.mass);
        let c = c + self.shift;
        let s = s + self.kick * c + self.phase * self.hbar;
        (c, momentum + self.kick, s)
    }
}

/// Composed propagator of the arm whose spin starts at `charge`.
pub fn sequence_propagator(params: &ExperimentParams, seq: &PulseSequence, charge: i32) -> LinearPropagator {
    let forces = SpinForce::of(params);
    let (m, h) = (params.mass, params.constants.hbar);
    seq.segments().iter().fold(LinearPropagator::identity(m, h), |acc, seg| {
        let f = forces.for_charge(charge * seg.sign);
        acc.then(&LinearPropagator::segment(f, seg.duration, m, h))
    })
}
