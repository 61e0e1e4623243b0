//! Piecewise uniform-acceleration trajectories of the spin-conditioned arms.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ExperimentParams;
use crate::sequence::{PulseSequence, Segment};
use crate::spin::{SpinBranch, SpinForce};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    /// s
    pub time: f64,
    /// m
    pub center: f64,
    /// kg m/s
    pub momentum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTrajectory {
    pub mass: f64,
    pub breakpoints: Vec<Breakpoint>,
}

impl BranchTrajectory {
    pub fn end(&self) -> Breakpoint {
        *self.breakpoints.last().expect("trajectory has at least one breakpoint")
    }

    /// Position and momentum at time `t`, clamped to the trajectory span.
    pub fn state_at(&self, t: f64) -> (f64, f64) {
        let bps = &self.breakpoints;
        let first = bps[0];
        if t <= first.time || bps.len() == 1 {
            return (first.center, first.momentum);
        }
        for w in bps.windows(2) {
            let (a, b) = (w[0], w[1]);
            if t <= b.time {
                let force = (b.momentum - a.momentum) / (b.time - a.time);
                let s = t - a.time;
                let x = a.center + a.momentum / self.mass * s + 0.5 * force / self.mass * s * s;
                return (x, a.momentum + force * s);
            }
        }
        let last = self.end();
        (last.center, last.momentum)
    }
}

/// Advances `(x, p)` under a constant force for `duration`.
pub(crate) fn advance(x: f64, p: f64, mass: f64, force: f64, duration: f64) -> (f64, f64) {
    let x = x + p / mass * duration + 0.5 * force / mass * duration * duration;
    (x, p + force * duration)
}

fn trajectory_from(
    mass: f64,
    forces: &SpinForce,
    segments: &[Segment],
    charge: i32,
    x0: f64,
    p0: f64,
) -> BranchTrajectory {
    let mut bps = Vec::with_capacity(segments.len() + 1);
    let (mut x, mut p) = (x0, p0);
    bps.push(Breakpoint { time: 0.0, center: x, momentum: p });
    for seg in segments {
        let f = forces.for_charge(charge * seg.sign);
        (x, p) = advance(x, p, mass, f, seg.duration);
        if seg.duration > 0.0 {
            bps.push(Breakpoint { time: seg.start + seg.duration, center: x, momentum: p });
        }
    }
    BranchTrajectory { mass, breakpoints: bps }
}

/// Trajectory of the arm that starts in spin `initial_spin`; the spin flips at
/// `t1` and `t2` and the last breakpoint is at `t3`.
pub fn classical_trajectory(
    params: &ExperimentParams,
    seq: &PulseSequence,
    initial_spin: SpinBranch,
    x0: f64,
    p0: f64,
) -> BranchTrajectory {
    charged_trajectory(params, seq, initial_spin.value(), x0, p0)
}

/// Trajectory for a collective spin value `charge` (force `charge * A - C`).
pub fn charged_trajectory(
    params: &ExperimentParams,
    seq: &PulseSequence,
    charge: i32,
    x0: f64,
    p0: f64,
) -> BranchTrajectory {
    trajectory_from(params.mass, &SpinForce::of(params), &seq.segments(), charge, x0, p0)
}

/// Relative coordinate `x_plus - x_minus` of the two arms at time `t`.
pub fn separation_at(params: &ExperimentParams, seq: &PulseSequence, t: f64) -> f64 {
    let accel = 2.0 * params.spin_force() / params.mass;
    let (mut d, mut v) = (0.0, 0.0);
    for seg in seq.segments_until(t) {
        (d, v) = advance(d, v, 1.0, accel * f64::from(seg.sign), seg.duration);
    }
    d
}

/// Relative position and velocity of the arms at the end of the sequence.
pub fn closing_residual(params: &ExperimentParams, seq: &PulseSequence) -> (f64, f64) {
    let accel = 2.0 * params.spin_force() / params.mass;
    let (mut d, mut v) = (0.0, 0.0);
    for seg in seq.segments() {
        (d, v) = advance(d, v, 1.0, accel * f64::from(seg.sign), seg.duration);
    }
    (d, v)
}

/// Time integral of the arm separation over the whole sequence, m s.
pub fn separation_integral(params: &ExperimentParams, seq: &PulseSequence) -> f64 {
    let accel = 2.0 * params.spin_force() / params.mass;
    let (mut d, mut v, mut area) = (0.0, 0.0, 0.0);
    for seg in seq.segments() {
        let a = accel * f64::from(seg.sign);
        let tau = seg.duration;
        area += d * tau + v * tau * tau / 2.0 + a * tau * tau * tau / 6.0;
        (d, v) = advance(d, v, 1.0, a, tau);
    }
    area
}

/// Maximum arm separation over the flight, m.
///
/// For a balanced sequence this is the closed form `2 (A/m) (t3/4)^2`,
/// reached at `t3/2`. Other sequences fall back to an exact scan of the
/// piecewise-quadratic separation (breakpoints plus interior turning points).
pub fn max_separation(params: &ExperimentParams, seq: &PulseSequence) -> f64 {
    if seq.is_balanced() {
        let q = seq.t3 / 4.0;
        return 2.0 * (params.spin_force() / params.mass).abs() * q * q;
    }
    max_separation_scan(params, seq)
}

pub(crate) fn max_separation_scan(params: &ExperimentParams, seq: &PulseSequence) -> f64 {
    let accel = 2.0 * params.spin_force() / params.mass;
    let (mut d, mut v, mut best) = (0.0_f64, 0.0_f64, 0.0_f64);
    for seg in seq.segments() {
        let a = accel * f64::from(seg.sign);
        if a != 0.0 {
            let s = -v / a;
            if s > 0.0 && s < seg.duration {
                best = best.max((d + v * s + 0.5 * a * s * s).abs());
            }
        }
        (d, v) = advance(d, v, 1.0, a, seg.duration);
        best = best.max(d.abs());
    }
    best
}

/// Eq.-(6)-as-printed value `(A/m) (t3/4)^2`, half the kinematic maximum.
/// Only used to annotate reports.
pub fn max_separation_as_printed(params: &ExperimentParams) -> f64 {
    let q = params.t3 / 4.0;
    params.spin_force() / params.mass * q * q
}

/// Checks a collective charge against `l` pseudo-spins.
pub fn check_charge(m: i32, l: u32) -> Result<()> {
    let l_i = l as i64;
    let m_i = i64::from(m);
    if m_i.abs() <= l_i && (l_i - m_i).rem_euclid(2) == 0 {
        Ok(())
    } else {
        Err(Error::Parity { m, l })
    }
}
