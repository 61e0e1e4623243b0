//! Several aligned NV centres in one crystal.
//!
//! With `l` pseudo-spins the force is `M A - C` with `M = 2n - l`, `n` the
//! number of `+1` spins, so the motion only depends on the Dicke sector.
//! A balanced sequence closes every sector and leaves sector `M` with the
//! phase `-M phi_g / 2`, which refactorizes into `l` copies of the single-spin
//! state `(|+1> + e^{i phi_g} |-1>) / sqrt(2)`.
//!
//! The sector actions also contain a gravity-independent term quadratic in
//! `M` (a one-axis twisting of the collective spin). It does not refactorize
//! and is reported separately in [`SectorPhase::twisting`].

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{gravitational_phase, ramsey_probability, PHASE_ROUTE_TOL};
use crate::error::{Error, Result};
use crate::kinematics::{charged_trajectory, check_charge, BranchTrajectory};
use crate::params::ExperimentParams;
use crate::propagator::sequence_propagator;
use crate::sequence::PulseSequence;
use crate::spin::SpinForce;
use crate::wavepacket::GaussianBranchState;

pub const MAX_SPINS: u32 = 30;
/// Largest `l` for which the full `2^l` statevector is built.
pub const MAX_STATEVECTOR_SPINS: u32 = 12;

/// Exact binomial coefficient for `n <= 62`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DickeSector {
    /// Number of `+1` spins.
    pub n: u32,
    pub multiplicity: u64,
    /// `M = 2n - l`
    pub collective_value: i32,
    /// Amplitude on the normalized symmetric state `|D_l^n>`.
    pub amplitude: Complex64,
}

/// `sum_n amplitude_n |D_l^n>` with normalized Dicke states, so that
/// `sum_n |amplitude_n|^2 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeDecomposition {
    pub l: u32,
    pub sectors: Vec<DickeSector>,
}

impl DickeDecomposition {
    pub fn norm_sqr(&self) -> f64 {
        self.sectors.iter().map(|s| s.amplitude.norm_sqr()).sum()
    }
}

fn check_spin_count(l: u32, max: u32) -> Result<()> {
    if (1..=max).contains(&l) {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "number of spins", value: f64::from(l), range: "1..=30 (statevector: 1..=12)" })
    }
}

/// Decomposes `((|+1> + |-1>)/sqrt 2)^{(x) l}`; sector `n` gets
/// `2^{-l/2} sqrt(binomial(l, n))`.
pub fn product_to_dicke(l: u32) -> Result<DickeDecomposition> {
    check_spin_count(l, MAX_SPINS)?;
    let scale = libm::pow(2.0, -f64::from(l) / 2.0);
    let sectors = (0..=l)
        .map(|n| {
            let multiplicity = binomial(l, n);
            DickeSector {
                n,
                multiplicity,
                collective_value: 2 * n as i32 - l as i32,
                amplitude: Complex64::new(scale * libm::sqrt(multiplicity as f64), 0.0),
            }
        })
        .collect();
    Ok(DickeDecomposition { l, sectors })
}

/// Centre-of-mass trajectory of sector `m` among `l` spins; the collective
/// value flips sign with every pulse.
pub fn collective_trajectory(
    params: &ExperimentParams,
    seq: &PulseSequence,
    m: i32,
    l: u32,
) -> Result<BranchTrajectory> {
    check_charge(m, l)?;
    Ok(charged_trajectory(params, seq, m, 0.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorPhase {
    pub n: u32,
    pub collective_value: i32,
    pub multiplicity: u64,
    /// `-M phi_g / 2`, rad.
    pub phase: f64,
    /// Gravity-independent `M^2` part of the sector action relative to `M = 0`, rad.
    pub twisting: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveFinalState {
    pub l: u32,
    /// rad
    pub phi_g: f64,
    /// Common motional state of all sectors at `t3` (ground state released at rest).
    pub motional: GaussianBranchState,
    pub sector_phases: Vec<SectorPhase>,
}

impl CollectiveFinalState {
    /// Sector amplitudes with the gravitational phases applied to the uniform product input.
    pub fn decomposition(&self) -> DickeDecomposition {
        let scale = libm::pow(2.0, -f64::from(self.l) / 2.0);
        let sectors = self
            .sector_phases
            .iter()
            .map(|s| DickeSector {
                n: s.n,
                multiplicity: s.multiplicity,
                collective_value: s.collective_value,
                amplitude: Complex64::from_polar(scale * libm::sqrt(s.multiplicity as f64), s.phase),
            })
            .collect();
        DickeDecomposition { l: self.l, sectors }
    }
}

/// State of `l` spins and the crystal after a balanced sequence.
///
/// Sector phases are `-M phi_g / 2`, with `phi_g` from
/// [`gravitational_phase`]; each is checked against the odd-in-`M` part of
/// that sector's own composed propagator.
pub fn collective_final_state(params: &ExperimentParams, seq: &PulseSequence, l: u32) -> Result<CollectiveFinalState> {
    check_spin_count(l, MAX_SPINS)?;
    let phi_g = gravitational_phase(params, seq)?;
    let base = sequence_propagator(params, seq, 0).phase;
    let sector_phases = (0..=l)
        .map(|n| {
            let m = 2 * n as i32 - l as i32;
            let up = sequence_propagator(params, seq, m).phase;
            let down = sequence_propagator(params, seq, -m).phase;
            let phase = -f64::from(m) * phi_g / 2.0;
            let odd = (up - down) / 2.0;
            let tol = PHASE_ROUTE_TOL * phase.abs() + 1e-13 * up.abs().max(down.abs());
            if (odd - phase).abs() > tol {
                return Err(Error::PhaseRouteMismatch { action: phase, propagator: odd });
            }
            Ok(SectorPhase {
                n,
                collective_value: m,
                multiplicity: binomial(l, n),
                phase,
                twisting: (up + down) / 2.0 - base,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let force = SpinForce::of(params).for_charge(0);
    let (mass, hbar) = (params.mass, params.constants.hbar);
    let motional = seq.segments().iter().fold(GaussianBranchState::coherent(params, 0.0, 0.0), |st, seg| {
        st.advance(force, seg.duration, mass, hbar)
    });
    Ok(CollectiveFinalState { l, phi_g, motional, sector_phases })
}

/// Full `2^l` spin statevector of a decomposition. Basis index bit `j` set
/// means spin `j` is `+1`.
pub fn reconstruct_statevector(decomp: &DickeDecomposition) -> Result<Vec<Complex64>> {
    check_spin_count(decomp.l, MAX_STATEVECTOR_SPINS)?;
    let mut per_state = alloc::vec![Complex64::new(0.0, 0.0); decomp.l as usize + 1];
    for s in &decomp.sectors {
        per_state[s.n as usize] = s.amplitude / libm::sqrt(s.multiplicity as f64);
    }
    Ok((0..1usize << decomp.l).map(|i| per_state[i.count_ones() as usize]).collect())
}

/// Probability for each spin to return to `|0>` after the final pulse. The
/// state is a product, so every spin shows the single-NV fringe.
pub fn collective_ramsey_signal(_l: u32, phi: f64) -> f64 {
    ramsey_probability(phi)
}
