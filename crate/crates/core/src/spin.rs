use serde::{Deserialize, Serialize};

use crate::params::ExperimentParams;

/// Eigenvalue of S_z for the NV electron spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinBranch {
    Minus,
    Zero,
    Plus,
}

impl SpinBranch {
    pub fn value(self) -> i32 {
        match self {
            SpinBranch::Minus => -1,
            SpinBranch::Zero => 0,
            SpinBranch::Plus => 1,
        }
    }

    pub fn from_value(v: i32) -> Option<Self> {
        match v {
            -1 => Some(SpinBranch::Minus),
            0 => Some(SpinBranch::Zero),
            1 => Some(SpinBranch::Plus),
            _ => None,
        }
    }

    /// Action of the flip C = |-1><+1| + |+1><-1|; `|0>` is left alone.
    pub fn flipped(self) -> Self {
        match self {
            SpinBranch::Minus => SpinBranch::Plus,
            SpinBranch::Zero => SpinBranch::Zero,
            SpinBranch::Plus => SpinBranch::Minus,
        }
    }
}

/// The two force scales of the Hamiltonian, in newtons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinForce {
    /// A = g_nv mu_B dB/dx
    pub magnitude: f64,
    /// C = m g cos(theta)
    pub gravity_component: f64,
}

impl SpinForce {
    pub fn of(params: &ExperimentParams) -> Self {
        Self {
            magnitude: params.spin_force(),
            gravity_component: params.gravity_force(),
        }
    }

    /// Force on the centre of mass for collective spin value `m`: m A - C.
    pub fn for_charge(&self, m: i32) -> f64 {
        f64::from(m) * self.magnitude - self.gravity_component
    }
}

/// Signed force along x for spin `s`, F = -dH/dx = s A - C.
pub fn branch_force(params: &ExperimentParams, s: SpinBranch) -> f64 {
    SpinForce::of(params).for_charge(s.value())
}
