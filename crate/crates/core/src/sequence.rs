use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ConfigMap;

/// Timing offsets added to the nominal flip and readout times, s.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Jitter {
    pub dt1: f64,
    pub dt2: f64,
    pub dt3: f64,
}

impl Jitter {
    pub fn new(dt1: f64, dt2: f64, dt3: f64) -> Self {
        Self { dt1, dt2, dt3 }
    }

    pub fn is_zero(&self) -> bool {
        self.dt1 == 0.0 && self.dt2 == 0.0 && self.dt3 == 0.0
    }
}

/// Flip times `t1`, `t2` and readout time `t3`, measured from release.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub jitter: Jitter,
}

/// A stretch of constant spin orientation. `sign` multiplies the initial
/// spin value: +1 before the first flip, -1 between flips, +1 after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub duration: f64,
    pub sign: i32,
}

const BALANCE_TOL: f64 = 1e-12;

impl PulseSequence {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Result<Self> {
        Self::with_jitter(t1, t2, t3, Jitter::default())
    }

    pub fn with_jitter(t1: f64, t2: f64, t3: f64, jitter: Jitter) -> Result<Self> {
        let seq = Self { t1, t2, t3, jitter };
        let [a, b, c] = seq.effective_times();
        let ordered = [a, b, c].iter().all(|t| t.is_finite()) && 0.0 < a && a < b && b < c;
        if ordered {
            Ok(seq)
        } else {
            Err(Error::SequenceOrder { t1: a, t2: b, t3: c })
        }
    }

    /// t1 = t3/4, t2 = 3 t3/4: the arms close in position and momentum at t3.
    pub fn balanced(t3: f64) -> Result<Self> {
        Self::new(0.25 * t3, 0.75 * t3, t3)
    }

    /// Reads `t1`, `t2` and the jitter keys, defaulting to the balanced timing for `t3`.
    pub fn from_config(config: &ConfigMap, t3: f64) -> Result<Self> {
        let t1 = config.get("t1").copied().unwrap_or(0.25 * t3);
        let t2 = config.get("t2").copied().unwrap_or(0.75 * t3);
        let j = |k: &str| config.get(k).copied().unwrap_or(0.0);
        Self::with_jitter(t1, t2, t3, Jitter::new(j("jitter_t1"), j("jitter_t2"), j("jitter_t3")))
    }

    /// Same nominal times with a different jitter triple.
    pub fn jittered(&self, jitter: Jitter) -> Result<Self> {
        Self::with_jitter(self.t1, self.t2, self.t3, jitter)
    }

    /// Flip and readout times including jitter.
    pub fn effective_times(&self) -> [f64; 3] {
        [self.t1 + self.jitter.dt1, self.t2 + self.jitter.dt2, self.t3 + self.jitter.dt3]
    }

    pub fn end_time(&self) -> f64 {
        self.t3 + self.jitter.dt3
    }

    /// Equivalently tau1 = tau3 = tau2 / 2, with no jitter.
    pub fn is_balanced(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= BALANCE_TOL * self.t3;
        self.jitter.is_zero() && close(self.t1, 0.25 * self.t3) && close(self.t2, 0.75 * self.t3)
    }

    /// Segment durations `[tau1, tau2, tau3]`.
    pub fn durations(&self) -> [f64; 3] {
        let [a, b, c] = self.effective_times();
        [a, b - a, c - b]
    }

    pub fn segments(&self) -> [Segment; 3] {
        let [a, b, _] = self.effective_times();
        let [d1, d2, d3] = self.durations();
        [
            Segment { start: 0.0, duration: d1, sign: 1 },
            Segment { start: a, duration: d2, sign: -1 },
            Segment { start: b, duration: d3, sign: 1 },
        ]
    }

    /// Segments cut off at time `t` (clamped to `[0, end_time]`). Evaluating
    /// the dynamics on these gives the intermediate superposition at `t`.
    pub fn segments_until(&self, t: f64) -> Vec<Segment> {
        let t = t.clamp(0.0, self.end_time());
        let mut out = Vec::with_capacity(3);
        for seg in self.segments() {
            if seg.start >= t && !out.is_empty() {
                break;
            }
            let duration = seg.duration.min(t - seg.start).max(0.0);
            out.push(Segment { duration, ..seg });
        }
        out
    }
}
