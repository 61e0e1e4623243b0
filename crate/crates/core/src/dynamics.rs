//! Evolution of the two-arm state through the flip sequence, the
//! gravitational phase and the derived fringe quantities.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics;
use crate::params::ExperimentParams;
use crate::propagator::sequence_propagator;
use crate::sequence::{Jitter, PulseSequence, Segment};
use crate::spin::SpinForce;
use crate::wavepacket::{relative_phase, CompositeState, GaussianBranchState};

pub use crate::kinematics::max_separation;

/// Relative tolerance between the two phase routes.
pub const PHASE_ROUTE_TOL: f64 = 1e-9;

/// phi_g = g cos(theta) A t3^3 / (16 hbar).
pub fn phase_closed_form(params: &ExperimentParams) -> f64 {
    params.g_earth * libm::cos(params.theta) * params.spin_force() * libm::pow(params.t3, 3.0)
        / (16.0 * params.constants.hbar)
}

/// Gravitational phase from the action difference of the arms,
/// `(1/hbar) m g cos(theta) int dx(t) dt`.
pub fn phase_from_action(params: &ExperimentParams, seq: &PulseSequence) -> f64 {
    params.gravity_force() * kinematics::separation_integral(params, seq) / params.constants.hbar
}

/// Gravitational phase from the scalar phases of the composed propagators of
/// the two arms. Valid only when the arms close (equal kicks and shifts).
pub fn phase_from_propagators(params: &ExperimentParams, seq: &PulseSequence) -> f64 {
    let plus = sequence_propagator(params, seq, 1);
    let minus = sequence_propagator(params, seq, -1);
    minus.phase - plus.phase
}

/// The phase `phi_g` accrued on the spin by a balanced sequence, rad.
///
/// Computed from the action integral and cross-checked against propagator
/// composition; the two must agree to [`PHASE_ROUTE_TOL`].
pub fn gravitational_phase(params: &ExperimentParams, seq: &PulseSequence) -> Result<f64> {
    if !seq.is_balanced() {
        return Err(Error::UnbalancedSequence);
    }
    let action = phase_from_action(params, seq);
    let propagator = phase_from_propagators(params, seq);
    let plus = sequence_propagator(params, seq, 1).phase.abs();
    let tol = PHASE_ROUTE_TOL * action.abs().max(propagator.abs()) + 1e-13 * plus;
    if (action - propagator).abs() > tol {
        return Err(Error::PhaseRouteMismatch { action, propagator });
    }
    Ok(action)
}

/// Probability of `|0>` after the closing Ramsey pulse, cos^2(phi/2).
pub fn ramsey_probability(phi: f64) -> f64 {
    let c = libm::cos(phi / 2.0);
    c * c
}

/// Per-branch bookkeeping relative to the spin-free reference trajectory.
#[derive(Clone, Copy)]
struct RelativeArm {
    offset: f64,
    velocity: f64,
    bulk_action: f64,
}

fn evolve_segments(
    params: &ExperimentParams,
    segments: &[Segment],
    initial: &CompositeState,
) -> CompositeState {
    let forces = SpinForce::of(params);
    let m = params.mass;
    let hbar = params.constants.hbar;
    let f_ref = forces.for_charge(0);

    // Both arms are measured against the free-fall path that starts where the
    // plus arm starts. The action of that path is common to the arms and dropped;
    // what is left per arm is
    //   m [x_ref w']_0^t + int (m w'^2 / 2 + F w) dt,   w = x - x_ref,
    // which involves no large cancelling terms.
    let (x0, p0) = (initial.plus_branch.center, initial.plus_branch.momentum);
    let start = |b: &GaussianBranchState| RelativeArm {
        offset: b.center - x0,
        velocity: (b.momentum - p0) / m,
        bulk_action: 0.0,
    };
    let mut arms = [start(&initial.plus_branch), start(&initial.minus_branch)];
    let initial_boundary = arms.map(|a| m * x0 * a.velocity);
    let (mut xr, mut pr) = (x0, p0);
    let mut elapsed = 0.0;

    for seg in segments {
        let tau = seg.duration;
        for (arm, charge) in arms.iter_mut().zip([1, -1]) {
            let f = forces.for_charge(charge * seg.sign);
            let a = (f - f_ref) / m;
            let (w, v) = (arm.offset, arm.velocity);
            let kinetic = m / 2.0 * (v * v * tau + v * a * tau * tau + a * a * tau * tau * tau / 3.0);
            let work = f * (w * tau + v * tau * tau / 2.0 + a * tau * tau * tau / 6.0);
            arm.bulk_action += kinetic + work;
            (arm.offset, arm.velocity) = kinematics::advance(w, v, 1.0, a, tau);
        }
        (xr, pr) = kinematics::advance(xr, pr, m, f_ref, tau);
        elapsed += tau;
    }

    let finish = |b: &GaussianBranchState, arm: &RelativeArm, boundary0: f64| GaussianBranchState {
        center: xr + arm.offset,
        momentum: pr + m * arm.velocity,
        sigma0: b.sigma0,
        spread_time: b.spread_time + elapsed,
        action_phase: b.action_phase + (arm.bulk_action + m * xr * arm.velocity - boundary0) / hbar,
    };
    CompositeState {
        plus_branch: finish(&initial.plus_branch, &arms[0], initial_boundary[0]),
        minus_branch: finish(&initial.minus_branch, &arms[1], initial_boundary[1]),
        ..*initial
    }
}

/// Evolves both arms through the whole sequence (flips at `t1`, `t2`, end at `t3`).
///
/// `action_phase` on each arm is the action `(1/hbar) int (p^2/2m - V) dt`
/// minus that of the spin-free free-fall path from the plus arm's starting
/// point, a global phase common to both arms.
pub fn evolve_sequence(params: &ExperimentParams, seq: &PulseSequence, initial: &CompositeState) -> CompositeState {
    evolve_segments(params, &seq.segments(), initial)
}

/// Same as [`evolve_sequence`] but stopped at time `t`, giving the
/// intermediate superposition.
pub fn evolve_until(params: &ExperimentParams, seq: &PulseSequence, initial: &CompositeState, t: f64) -> CompositeState {
    evolve_segments(params, &seq.segments_until(t), initial)
}

/// Evolution that accumulates each arm's absolute action directly. Agrees
/// with [`evolve_sequence`] up to the common global phase; kept as an
/// independent path.
pub fn evolve_sequence_absolute(
    params: &ExperimentParams,
    seq: &PulseSequence,
    initial: &CompositeState,
) -> CompositeState {
    let forces = SpinForce::of(params);
    let (m, hbar) = (params.mass, params.constants.hbar);
    let mut plus = initial.plus_branch;
    let mut minus = initial.minus_branch;
    for seg in seq.segments() {
        plus = plus.advance(forces.for_charge(seg.sign), seg.duration, m, hbar);
        minus = minus.advance(forces.for_charge(-seg.sign), seg.duration, m, hbar);
    }
    CompositeState { plus_branch: plus, minus_branch: minus, ..*initial }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalReport {
    /// rad
    pub phase_mean: f64,
    /// Sample standard deviation, rad.
    pub phase_spread: f64,
    pub visibility_mean: f64,
    pub mean_occupation: f64,
    pub n_samples: usize,
}

/// Mean phonon number of the trap at temperature `t_cm`.
pub fn mean_occupation(params: &ExperimentParams, t_cm: f64) -> f64 {
    if t_cm <= 0.0 {
        return 0.0;
    }
    let x = params.constants.hbar * params.trap_omega / (params.constants.k_boltzmann * t_cm);
    1.0 / libm::expm1(x)
}

/// Runs the sequence from coherent states drawn from the Glauber P function of
/// a thermal trap state at `t_cm` and collects the phase and overlap modulus.
pub fn thermal_phase_invariance(
    params: &ExperimentParams,
    seq: &PulseSequence,
    n_samples: usize,
    t_cm: f64,
    seed: u64,
) -> Result<ThermalReport> {
    thermal_with_occupation(params, seq, n_samples, mean_occupation(params, t_cm), seed)
}

/// As [`thermal_phase_invariance`] with the mean occupation given directly.
pub fn thermal_with_occupation(
    params: &ExperimentParams,
    seq: &PulseSequence,
    n_samples: usize,
    nbar: f64,
    seed: u64,
) -> Result<ThermalReport> {
    if !seq.is_balanced() {
        return Err(Error::UnbalancedSequence);
    }
    if n_samples == 0 {
        return Err(Error::OutOfRange { what: "n_samples", value: 0.0, range: ">= 1" });
    }
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::OutOfRange { what: "mean occupation", value: nbar, range: "[0, inf)" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // P(beta) = exp(-|beta|^2 / nbar) / (pi nbar): Re and Im each N(0, nbar/2).
    let spread = libm::sqrt(nbar / 2.0);
    let s0 = params.sigma0();
    let hbar = params.constants.hbar;
    let mut phases = Vec::with_capacity(n_samples);
    let mut vis_sum = 0.0;
    for _ in 0..n_samples {
        let (re, im) = if nbar > 0.0 {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            (spread * re, spread * im)
        } else {
            (0.0, 0.0)
        };
        // <x> = 2 sigma0 Re(beta), <p> = (hbar / sigma0) Im(beta)
        let initial = CompositeState::released(params, 2.0 * s0 * re, hbar / s0 * im);
        let fin = evolve_sequence(params, seq, &initial);
        let parts = fin.overlap_parts()?;
        phases.push(-parts.phase);
        vis_sum += parts.modulus();
    }
    let n = phases.len() as f64;
    // deviations from the first sample keep the sums small
    let pivot = phases[0];
    let shift = phases.iter().map(|p| p - pivot).sum::<f64>() / n;
    let mean = pivot + shift;
    let var = if phases.len() > 1 {
        phases.iter().map(|p| (p - pivot - shift) * (p - pivot - shift)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(ThermalReport {
        phase_mean: mean,
        phase_spread: libm::sqrt(var),
        visibility_mean: vis_sum / n,
        mean_occupation: nbar,
        n_samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterRow {
    pub jitter: Jitter,
    /// |<psi- | psi+>|
    pub visibility: f64,
    /// Interferometer phase, rad.
    pub phase: f64,
    /// Phase minus the unjittered phase, rad.
    pub residual_phase: f64,
}

/// Visibility and phase for each timing-offset triple, starting from the trap
/// ground state at the origin.
pub fn jitter_visibility_scan(
    params: &ExperimentParams,
    seq: &PulseSequence,
    jitter_grid: &[Jitter],
) -> Result<Vec<JitterRow>> {
    let initial = CompositeState::released(params, 0.0, 0.0);
    let nominal = relative_phase(&evolve_sequence(params, &seq.jittered(Jitter::default())?, &initial))?;
    jitter_grid
        .iter()
        .map(|&j| {
            let fin = evolve_sequence(params, &seq.jittered(j)?, &initial);
            let parts = fin.overlap_parts()?;
            Ok(JitterRow {
                jitter: j,
                visibility: parts.modulus(),
                phase: -parts.phase,
                residual_phase: -parts.phase - nominal,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fixtures::paper_params;
    use crate::wavepacket::branch_overlap;
    use core::f64::consts::{FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn balanced(p: &ExperimentParams) -> PulseSequence {
        PulseSequence::balanced(p.t3).unwrap()
    }

    #[test]
    fn paper_phase_value() {
        let p = paper_params();
        let phi = gravitational_phase(&p, &balanced(&p)).unwrap();
        // oracle: int dx dt = 4 (A/m)(t3/4)^3, phi = m g int dx dt / hbar
        let q = p.t3 / 4.0;
        let oracle = p.mass * p.g_earth * 4.0 * p.spin_force() / p.mass * q * q * q / p.constants.hbar;
        assert!((phi - oracle).abs() < 1e-12 * oracle);
        assert!((phi - 1.0795e6).abs() < 1e3, "{phi}");
        assert!((phi - phase_closed_form(&p)).abs() < 1e-12 * phi);
    }

    #[test]
    fn phase_vanishes_without_gravity_or_gradient() {
        let mut p = paper_params();
        p.theta = FRAC_PI_2;
        assert!(gravitational_phase(&p, &balanced(&p)).unwrap().abs() < 1e-9);
        let mut p = paper_params();
        p.b_gradient = 0.0;
        assert_eq!(gravitational_phase(&p, &balanced(&p)).unwrap(), 0.0);
    }

    #[test]
    fn unbalanced_phase_is_an_error() {
        let p = paper_params();
        let seq = PulseSequence::new(0.3 * p.t3, 0.75 * p.t3, p.t3).unwrap();
        assert_eq!(gravitational_phase(&p, &seq), Err(Error::UnbalancedSequence));
    }

    #[test]
    fn mass_independence() {
        let p = paper_params();
        let a = p.spin_force();
        let reference = gravitational_phase(&p, &balanced(&p)).unwrap();
        for m in [1e-18, 1e-17, 1e-16] {
            let q = ExperimentParams { mass: m, ..p }.with_spin_force(a);
            let phi = gravitational_phase(&q, &balanced(&q)).unwrap();
            assert!((phi - reference).abs() <= 1e-12 * reference, "{m}: {phi} vs {reference}");
        }
    }

    #[test]
    fn ramsey_values() {
        assert_eq!(ramsey_probability(0.0), 1.0);
        assert!(ramsey_probability(PI) < 1e-30);
        assert!((ramsey_probability(FRAC_PI_2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn balanced_run_is_separable_with_phase() {
        let p = paper_params();
        let seq = balanced(&p);
        let fin = evolve_sequence(&p, &seq, &CompositeState::released(&p, 0.0, 0.0));
        let (a, b) = (fin.plus_branch, fin.minus_branch);
        assert!((a.center - b.center).abs() <= 1e-12 * a.center.abs());
        assert!((a.momentum - b.momentum).abs() <= 1e-12 * a.momentum.abs());
        assert_eq!(a.spread_time, p.t3);
        let phi = gravitational_phase(&p, &seq).unwrap();
        let o = fin.overlap_parts().unwrap();
        assert!(o.modulus() >= 1.0 - 1e-12);
        assert!((o.phase + phi).abs() <= 1e-9 * phi, "{} vs {}", o.phase, -phi);
        assert!((relative_phase(&fin).unwrap() - phi).abs() <= 1e-9 * phi);
        let z = branch_overlap(&fin).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-12);
        assert!((fin.amplitude_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn absolute_and_relative_paths_agree() {
        let p = paper_params();
        let seq = balanced(&p);
        let init = CompositeState::released(&p, 2e-11, 3e-24);
        let rel = evolve_sequence(&p, &seq, &init);
        let abs = evolve_sequence_absolute(&p, &seq, &init);
        let d_rel = rel.plus_branch.action_phase - rel.minus_branch.action_phase;
        let d_abs = abs.plus_branch.action_phase - abs.minus_branch.action_phase;
        assert!((d_rel - d_abs).abs() <= 1e-9 * d_rel.abs(), "{d_rel} {d_abs}");
        assert!((rel.plus_branch.center - abs.plus_branch.center).abs() <= 1e-12 * abs.plus_branch.center.abs());
    }

    #[test]
    fn propagator_endpoint_matches_evolution() {
        let p = paper_params();
        let seq = PulseSequence::new(0.2 * p.t3, 0.7 * p.t3, p.t3).unwrap();
        let init = CompositeState::released(&p, 1e-11, -2e-24);
        let fin = evolve_sequence_absolute(&p, &seq, &init);
        let (c, mom, s) = sequence_propagator(&p, &seq, 1).apply(1e-11, -2e-24, 0.0);
        assert!((c - fin.plus_branch.center).abs() <= 1e-12 * c.abs());
        assert!((mom - fin.plus_branch.momentum).abs() <= 1e-12 * mom.abs());
        let s_evolved = fin.plus_branch.action_phase * p.constants.hbar;
        assert!((s - s_evolved).abs() <= 1e-10 * s.abs(), "{s} {s_evolved}");
    }

    #[test]
    fn intermediate_state_at_half_time() {
        let p = paper_params();
        let seq = balanced(&p);
        let mid = evolve_until(&p, &seq, &CompositeState::released(&p, 0.0, 0.0), p.t3 / 2.0);
        let d = mid.plus_branch.center - mid.minus_branch.center;
        assert!((d - max_separation(&p, &seq)).abs() <= 1e-12 * d);
        assert_eq!(mid.plus_branch.spread_time, p.t3 / 2.0);
    }

    #[test]
    fn first_order_jitter_residual() {
        // Oracle: expand the relative motion to first order in delta t1.
        // Segments (tau+d, 2tau-d, tau) with relative acceleration a = 2A/m give
        // dx = 6 a tau d = 3 (A/m) t3 d and dv = 2 a d.
        let p = paper_params();
        let seq = balanced(&p);
        let init = CompositeState::released(&p, 0.0, 0.0);
        for d in [1e-10, 1e-9, 4e-9] {
            let fin = evolve_sequence(&p, &seq.jittered(Jitter::new(d, 0.0, 0.0)).unwrap(), &init);
            let dx = fin.plus_branch.center - fin.minus_branch.center;
            let dp = fin.plus_branch.momentum - fin.minus_branch.momentum;
            let lin_x = 3.0 * p.spin_force() / p.mass * p.t3 * d;
            let lin_p = 4.0 * p.spin_force() * d;
            assert!((dx - lin_x).abs() <= 2.0 * (d / p.t3) * lin_x.abs() + 1e-25, "{dx:e} {lin_x:e}");
            assert!((dp - lin_p).abs() <= 1e-6 * lin_p.abs());
        }
    }

    /// Overlap modulus from the phase-space displacement pulled back to t = 0,
    /// where both packets are the trap ground state.
    fn pulled_back_modulus(p: &ExperimentParams, dx: f64, dp: f64, t: f64) -> f64 {
        let s0 = p.sigma0();
        let d0 = dx - dp / p.mass * t;
        libm::exp(-d0 * d0 / (8.0 * s0 * s0) - s0 * s0 * dp * dp / (2.0 * p.constants.hbar * p.constants.hbar))
    }

    #[test]
    fn jitter_scan_against_pulled_back_displacement() {
        let p = paper_params();
        let seq = balanced(&p);
        let grid = [Jitter::default(), Jitter::new(5e-9, 0.0, 0.0), Jitter::new(0.0, -3e-9, 2e-9)];
        let rows = jitter_visibility_scan(&p, &seq, &grid).unwrap();
        assert!((rows[0].visibility - 1.0).abs() < 1e-12);
        assert!(rows[0].residual_phase.abs() < 1e-6);
        for row in &rows[1..] {
            let tr_p = kinematics::classical_trajectory(&p, &seq.jittered(row.jitter).unwrap(), crate::SpinBranch::Plus, 0.0, 0.0).end();
            let tr_m = kinematics::classical_trajectory(&p, &seq.jittered(row.jitter).unwrap(), crate::SpinBranch::Minus, 0.0, 0.0).end();
            let t_end = seq.jittered(row.jitter).unwrap().end_time();
            let oracle = pulled_back_modulus(&p, tr_p.center - tr_m.center, tr_p.momentum - tr_m.momentum, t_end);
            assert!((row.visibility - oracle).abs() < 1e-9, "{} {}", row.visibility, oracle);
        }
        // 5 ns on t1 at omega = 1e5 rad/s; frozen from the pulled-back oracle
        assert!((rows[1].visibility - 0.8271).abs() < 1e-3, "{}", rows[1].visibility);
    }

    #[test]
    fn common_flip_delay_closes_momentum() {
        let p = paper_params();
        let seq = balanced(&p);
        let fin = evolve_sequence(&p, &seq.jittered(Jitter::new(2e-9, 2e-9, 0.0)).unwrap(), &CompositeState::released(&p, 0.0, 0.0));
        let dp = fin.plus_branch.momentum - fin.minus_branch.momentum;
        assert!(dp.abs() < 1e-12 * p.spin_force() * p.t3);
        let dx = fin.plus_branch.center - fin.minus_branch.center;
        assert!(dx.abs() > 0.0);
        let s0 = p.sigma0();
        let o = fin.overlap_parts().unwrap();
        assert!((o.modulus() - libm::exp(-dx * dx / (8.0 * s0 * s0))).abs() < 1e-12);
    }

    #[test]
    fn thermal_invariance_paper_params() {
        let p = paper_params();
        let seq = balanced(&p);
        for nbar in [0.0, 1.0, 10.0, 100.0] {
            let r = thermal_with_occupation(&p, &seq, 200, nbar, 7).unwrap();
            assert!(r.phase_spread <= 1e-10, "nbar {nbar}: {}", r.phase_spread);
            assert!(r.visibility_mean >= 1.0 - 1e-12);
        }
        let cold = thermal_phase_invariance(&p, &seq, 5, 0.0, 1).unwrap();
        assert_eq!(cold.mean_occupation, 0.0);
        assert_eq!(cold.phase_spread, 0.0);
    }

    #[test]
    fn thermal_is_deterministic_in_seed() {
        let p = paper_params();
        let seq = balanced(&p);
        let a = thermal_phase_invariance(&p, &seq, 50, 1e-3, 42).unwrap();
        let b = thermal_phase_invariance(&p, &seq, 50, 1e-3, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phase_cubic_in_flight_time() {
        let p = paper_params();
        let phi = |t3: f64| {
            let q = ExperimentParams { t3, ..p };
            gravitational_phase(&q, &balanced(&q)).unwrap()
        };
        let slope = (libm::log(phi(1e-3)) - libm::log(phi(1e-4))) / libm::log(10.0);
        assert!((slope - 3.0).abs() < 1e-6, "{slope}");
    }

    #[test]
    fn fringe_extrema_follow_phase() {
        // P0 = 1 exactly where phi_g(theta) crosses multiples of 2 pi, 0 at odd multiples of pi
        let p = paper_params();
        let phi0 = phase_closed_form(&p);
        for k in [1.0, 2.0, 7.0] {
            let theta = libm::acos(k * PI / phi0);
            let q = ExperimentParams { theta, ..p };
            let phi = gravitational_phase(&q, &balanced(&q)).unwrap();
            let expected = if k % 2.0 == 0.0 { 1.0 } else { 0.0 };
            assert!((ramsey_probability(phi) - expected).abs() < 1e-6, "k={k}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn phase_routes_agree(
            grad in 1e3f64..1e8,
            theta in 0.0f64..1.5,
            t3 in 1e-5f64..1e-3,
            mass in 1e-18f64..1e-15,
        ) {
            let mut p = paper_params();
            p.b_gradient = grad;
            p.theta = theta;
            p.t3 = t3;
            p.mass = mass;
            let seq = balanced(&p);
            let a = phase_from_action(&p, &seq);
            let b = phase_from_propagators(&p, &seq);
            prop_assert!((a - b).abs() <= 1e-9 * a.abs(), "{} {}", a, b);
            prop_assert!((a - phase_closed_form(&p)).abs() <= 1e-12 * a.abs());
        }

        #[test]
        fn initial_condition_independence(x0 in -1e-9f64..1e-9, p0 in -1e-22f64..1e-22) {
            let p = paper_params();
            let seq = balanced(&p);
            let reference = relative_phase(&evolve_sequence(&p, &seq, &CompositeState::released(&p, 0.0, 0.0))).unwrap();
            let phi = relative_phase(&evolve_sequence(&p, &seq, &CompositeState::released(&p, x0, p0))).unwrap();
            prop_assert!((phi - reference).abs() <= 1e-12 * reference.abs());
        }

        #[test]
        fn closure_for_any_params(grad in 1.0f64..1e9, t3 in 1e-6f64..1e-2) {
            let mut p = paper_params();
            p.b_gradient = grad;
            p.t3 = t3;
            let seq = balanced(&p);
            let (d, v) = kinematics::closing_residual(&p, &seq);
            prop_assert!(d.abs() <= 1e-12 * max_separation(&p, &seq));
            prop_assert!(v.abs() <= 1e-12 * 2.0 * p.spin_force() / p.mass * t3);
        }

        #[test]
        fn phase_linear_in_g_and_force(scale in 0.1f64..10.0) {
            let p = paper_params();
            let base = phase_closed_form(&p);
            let g = ExperimentParams { g_earth: p.g_earth * scale, ..p };
            let a = p.with_spin_force(p.spin_force() * scale);
            let c = ExperimentParams { theta: libm::acos(0.09 * scale), ..p };
            prop_assert!((gravitational_phase(&g, &balanced(&g)).unwrap() / base - scale).abs() < 1e-12);
            prop_assert!((gravitational_phase(&a, &balanced(&a)).unwrap() / base - scale).abs() < 1e-12);
            prop_assert!((gravitational_phase(&c, &balanced(&c)).unwrap() / base - 0.09 * scale).abs() < 1e-12);
        }
    }
}
