//! Split-step Fourier solver for the two spin arms on a 1D grid.
//!
//! Everything runs in natural units `m = hbar = 1` with the trap ground-state
//! width `sigma0 = 1`, so the time unit is `m sigma0^2 / hbar = 1 / (2 omega)`
//! and a released packet spreads as `sqrt(1 + t^2 / 4)`. The interferometer
//! phase is invariant under this rescaling, which is what lets a desk-scale
//! grid run stand in for the megaradian SI problem.

use std::f64::consts::PI;
use std::sync::Arc;

use nanoramsey_core::dynamics::{evolve_sequence, gravitational_phase};
use nanoramsey_core::kinematics::classical_trajectory;
use nanoramsey_core::wavepacket::{relative_phase, wavepacket_width, CompositeState};
use nanoramsey_core::{ExperimentParams, PulseSequence, SpinBranch, SpinForce};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

/// Largest scaled phase `scale_params` accepts.
pub const MAX_SCALED_PHASE: f64 = 1e4;
/// Largest phase the oracle will try to resolve.
pub const MAX_ORACLE_PHASE: f64 = 1e3;
/// A packet must keep this many widths between its centre and the box edge.
pub const EDGE_WIDTHS: f64 = 8.0;
const MIN_POINTS: usize = 256;
const BOUNDARY_CHECK_EVERY: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error(transparent)]
    Core(#[from] nanoramsey_core::Error),
    #[error("scaled phase {phase:.3e} rad exceeds {limit:e}; reduce t3 or b_gradient to a desk-scale problem")]
    PhaseTooLarge { phase: f64, limit: f64 },
    #[error("invalid grid: {0}")]
    InvalidSpec(&'static str),
    #[error("packet within {EDGE_WIDTHS} widths of the boundary at t = {time:.4}; enlarge the box to at least [{need_min:.3}, {need_max:.3}]")]
    Boundary { time: f64, need_min: f64, need_max: f64 },
    #[error("arms did not recombine: overlap modulus {modulus:.6} < 0.99")]
    ClosureFailure { modulus: f64 },
}

pub type Result<T, E = GridError> = std::result::Result<T, E>;

/// Dimensionless version of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledUnits {
    /// m
    pub sigma0: f64,
    /// s
    pub time_unit: f64,
    /// kg
    pub mass: f64,
    /// J s
    pub hbar: f64,
    /// A t_u^2 / (m sigma0)
    pub a_spin: f64,
    /// C t_u^2 / (m sigma0)
    pub a_grav: f64,
    /// Effective flip and readout times in units of `time_unit`.
    pub times: [f64; 3],
}

/// SI quantities recovered from [`ScaledUnits`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiProblem {
    pub spin_force: f64,
    pub gravity_force: f64,
    pub trap_omega: f64,
    pub times: [f64; 3],
}

impl ScaledUnits {
    pub fn to_si(&self) -> SiProblem {
        let f = self.mass * self.sigma0 / (self.time_unit * self.time_unit);
        SiProblem {
            spin_force: self.a_spin * f,
            gravity_force: self.a_grav * f,
            trap_omega: self.hbar / (2.0 * self.mass * self.sigma0 * self.sigma0),
            times: self.times.map(|t| t * self.time_unit),
        }
    }

    /// `a_A a_C t3^3 / 16`, the closed-form phase for a balanced run of the same length.
    pub fn phase_scale(&self) -> f64 {
        self.a_spin * self.a_grav * self.times[2].powi(3) / 16.0
    }

    /// Segment durations and spin signs.
    pub fn segments(&self) -> [(f64, i32); 3] {
        let [t1, t2, t3] = self.times;
        [(t1, 1), (t2 - t1, -1), (t3 - t2, 1)]
    }

    fn force(&self, charge: i32, sign: i32) -> f64 {
        f64::from(charge * sign) * self.a_spin - self.a_grav
    }

    /// Classical position and momentum of an arm at scaled time `t`.
    pub fn classical_state(&self, charge: i32, t: f64) -> (f64, f64) {
        let (mut x, mut p, mut start) = (0.0, 0.0, 0.0);
        for (dur, sign) in self.segments() {
            let s = (t - start).clamp(0.0, dur);
            let f = self.force(charge, sign);
            x += p * s + 0.5 * f * s * s;
            p += f * s;
            start += dur;
            if t <= start {
                break;
            }
        }
        (x, p)
    }
}

/// Maps an SI run to natural units. Fails for problems whose phase is too
/// large to resolve on a grid.
pub fn scale_params(params: &ExperimentParams, seq: &PulseSequence) -> Result<ScaledUnits> {
    let sigma0 = params.sigma0();
    let hbar = params.constants.hbar;
    let time_unit = params.mass * sigma0 * sigma0 / hbar;
    let to_accel = time_unit * time_unit / (params.mass * sigma0);
    let forces = SpinForce::of(params);
    let units = ScaledUnits {
        sigma0,
        time_unit,
        mass: params.mass,
        hbar,
        a_spin: forces.magnitude * to_accel,
        a_grav: forces.gravity_component * to_accel,
        times: seq.effective_times().map(|t| t / time_unit),
    };
    let phase = units.phase_scale().abs();
    if !(phase <= MAX_SCALED_PHASE) {
        return Err(GridError::PhaseTooLarge { phase, limit: MAX_SCALED_PHASE });
    }
    Ok(units)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Power of two, at least 256.
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    /// Largest time step; each segment uses the smallest whole number of
    /// steps not exceeding it, so flips land on step boundaries.
    pub dt: f64,
    /// Lower bound on the steps taken in any segment.
    pub steps_per_segment: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < MIN_POINTS || !self.n_points.is_power_of_two() {
            return Err(GridError::InvalidSpec("n_points must be a power of two >= 256"));
        }
        if !(self.x_max > self.x_min) {
            return Err(GridError::InvalidSpec("x_max must exceed x_min"));
        }
        if !(self.dt > 0.0) || self.steps_per_segment == 0 {
            return Err(GridError::InvalidSpec("dt and steps_per_segment must be positive"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|i| self.x_min + i as f64 * dx).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n).map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk).collect()
    }

    /// Steps and step length for a segment of the given duration.
    pub fn steps_for(&self, duration: f64) -> (usize, f64) {
        let n = ((duration / self.dt).ceil() as usize).max(self.steps_per_segment);
        (n, duration / n as f64)
    }

    /// Box holding both arms' classical excursion plus ten final widths on
    /// each side, with a wavenumber cutoff 1.5 times the largest arm momentum
    /// plus ten momentum widths.
    pub fn auto(units: &ScaledUnits, dt: f64) -> Self {
        let t3 = units.times[2];
        let samples = 4096;
        let (mut lo, mut hi, mut p_max) = (0.0_f64, 0.0_f64, 0.0_f64);
        for charge in [1, -1] {
            for i in 0..=samples {
                let (x, p) = units.classical_state(charge, t3 * i as f64 / samples as f64);
                lo = lo.min(x);
                hi = hi.max(x);
                p_max = p_max.max(p.abs());
            }
        }
        let width = (1.0 + t3 * t3 / 4.0).sqrt();
        let half = (hi - lo) / 2.0 + 10.0 * width;
        let k_max = 1.5 * (p_max + 10.0 * 0.5);
        let dx = PI / k_max;
        let n = ((2.0 * half / dx).ceil() as usize).max(MIN_POINTS).next_power_of_two();
        let centre = (hi + lo) / 2.0;
        let span = n as f64 * dx;
        Self { n_points: n, x_min: centre - span / 2.0, x_max: centre + span / 2.0, dt, steps_per_segment: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub amplitudes: Vec<Complex64>,
    pub x_min: f64,
    pub dx: f64,
}

impl GridWavefunction {
    /// Trap ground state `(2 pi)^{-1/4} exp(-x^2 / 4)` centred at `x0` with momentum `p0`.
    pub fn ground_state(spec: &GridSpec, x0: f64, p0: f64) -> Self {
        let norm = (2.0 * PI).powf(-0.25);
        let amplitudes = spec
            .positions()
            .iter()
            .map(|&x| Complex64::from_polar(norm * (-(x - x0) * (x - x0) / 4.0).exp(), p0 * (x - x0)))
            .collect();
        Self { amplitudes, x_min: spec.x_min, dx: spec.dx() }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn mean_x(&self) -> f64 {
        let w: f64 = self.amplitudes.iter().enumerate().map(|(i, a)| a.norm_sqr() * self.x(i)).sum();
        w * self.dx / self.norm()
    }

    /// Standard deviation of |psi|^2.
    pub fn width(&self) -> f64 {
        let mean = self.mean_x();
        let var: f64 = self.amplitudes.iter().enumerate().map(|(i, a)| a.norm_sqr() * (self.x(i) - mean).powi(2)).sum();
        (var * self.dx / self.norm()).sqrt()
    }

    /// `<psi|p|psi>` from the spectrum.
    pub fn mean_p(&self) -> f64 {
        let n = self.amplitudes.len();
        let mut buf = self.amplitudes.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let dk = 2.0 * PI / (n as f64 * self.dx);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, a) in buf.iter().enumerate() {
            let k = if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk;
            num += a.norm_sqr() * k;
            den += a.norm_sqr();
        }
        num / den
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.dx
    }
}

/// Reusable FFT plans and phase tables for one grid.
struct Stepper {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    x: Vec<f64>,
    k2: Vec<f64>,
    spec: GridSpec,
}

impl Stepper {
    fn new(spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            forward: planner.plan_fft_forward(spec.n_points),
            inverse: planner.plan_fft_inverse(spec.n_points),
            x: spec.positions(),
            k2: spec.wavenumbers().iter().map(|k| k * k).collect(),
            spec: *spec,
        })
    }

    fn kick(&self, psi: &mut [Complex64], force: f64, dt: f64) {
        for (a, x) in psi.iter_mut().zip(&self.x) {
            *a *= Complex64::from_polar(1.0, force * x * dt);
        }
    }

    fn drift(&self, psi: &mut [Complex64], dt: f64) {
        self.forward.process(psi);
        let scale = 1.0 / self.spec.n_points as f64;
        for (a, k2) in psi.iter_mut().zip(&self.k2) {
            *a *= Complex64::from_polar(scale, -0.5 * k2 * dt);
        }
        self.inverse.process(psi);
    }

    fn check_edges(&self, psi: &GridWavefunction, time: f64) -> Result<()> {
        let (c, w) = (psi.mean_x(), psi.width());
        let (need_min, need_max) = (c - EDGE_WIDTHS * w, c + EDGE_WIDTHS * w);
        if need_min < self.spec.x_min || need_max > self.spec.x_max {
            return Err(GridError::Boundary { time, need_min, need_max });
        }
        Ok(())
    }

    /// Strang splitting with the half kicks of neighbouring steps fused.
    fn evolve(&self, psi: &mut GridWavefunction, force: f64, duration: f64, clock: f64) -> Result<()> {
        if duration <= 0.0 {
            return Ok(());
        }
        let (n, dt) = self.spec.steps_for(duration);
        self.kick(&mut psi.amplitudes, force, dt / 2.0);
        for i in 0..n {
            self.drift(&mut psi.amplitudes, dt);
            self.kick(&mut psi.amplitudes, force, if i + 1 < n { dt } else { dt / 2.0 });
            if (i + 1) % BOUNDARY_CHECK_EVERY == 0 || i + 1 == n {
                self.check_edges(psi, clock + (i + 1) as f64 * dt)?;
            }
        }
        Ok(())
    }
}

/// Evolves under `H = p^2/2 - force x` for `duration` (natural units).
pub fn split_step_evolve(psi: &GridWavefunction, force: f64, duration: f64, spec: &GridSpec) -> Result<GridWavefunction> {
    let stepper = Stepper::new(spec)?;
    let mut out = psi.clone();
    stepper.evolve(&mut out, force, duration, 0.0)?;
    Ok(out)
}

fn evolve_arm(units: &ScaledUnits, stepper: &Stepper, charge: i32, from: f64, to: f64, psi: &mut GridWavefunction) -> Result<()> {
    let mut start = 0.0;
    for (dur, sign) in units.segments() {
        let (a, b) = (from.max(start), to.min(start + dur));
        if b > a {
            stepper.evolve(psi, units.force(charge, sign), b - a, a)?;
        }
        start += dur;
    }
    Ok(())
}

/// Both arms after the full sequence.
#[derive(Debug, Clone)]
pub struct ArmPair {
    pub plus: GridWavefunction,
    pub minus: GridWavefunction,
    /// Largest |norm - 1| of the two arms.
    pub norm_drift: f64,
}

/// Runs the `+1` and `-1` arms from the ground state at rest, in parallel.
pub fn run_arms(units: &ScaledUnits, spec: &GridSpec) -> Result<ArmPair> {
    let stepper = Stepper::new(spec)?;
    let t3 = units.times[2];
    let run = |charge| -> Result<GridWavefunction> {
        let mut psi = GridWavefunction::ground_state(spec, 0.0, 0.0);
        stepper.check_edges(&psi, 0.0)?;
        evolve_arm(units, &stepper, charge, 0.0, t3, &mut psi)?;
        Ok(psi)
    };
    let (plus, minus) = rayon::join(|| run(1), || run(-1));
    let (plus, minus) = (plus?, minus?);
    let norm_drift = (plus.norm() - 1.0).abs().max((minus.norm() - 1.0).abs());
    Ok(ArmPair { plus, minus, norm_drift })
}

/// Unwraps `raw` onto the 2 pi branch nearest `reference`.
pub fn unwrap_near(raw: f64, reference: f64) -> f64 {
    raw + 2.0 * PI * ((reference - raw) / (2.0 * PI)).round()
}

fn analytic_phase(params: &ExperimentParams, seq: &PulseSequence) -> Result<f64> {
    if seq.is_balanced() {
        return Ok(gravitational_phase(params, seq)?);
    }
    let fin = evolve_sequence(params, seq, &CompositeState::released(params, 0.0, 0.0));
    Ok(relative_phase(&fin)?)
}

/// Grid value of the interferometer phase `arg <psi_plus | psi_minus>`, unwrapped
/// onto the branch of the analytic prediction.
pub fn oracle_phase(params: &ExperimentParams, seq: &PulseSequence, spec: &GridSpec) -> Result<f64> {
    let units = scale_params(params, seq)?;
    let phase = units.phase_scale().abs();
    if phase > MAX_ORACLE_PHASE {
        return Err(GridError::PhaseTooLarge { phase, limit: MAX_ORACLE_PHASE });
    }
    let arms = run_arms(&units, spec)?;
    let overlap = arms.plus.inner(&arms.minus);
    if seq.is_balanced() && overlap.norm() < 0.99 {
        return Err(GridError::ClosureFailure { modulus: overlap.norm() });
    }
    Ok(unwrap_near(overlap.arg(), analytic_phase(params, seq)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub units: ScaledUnits,
    pub grid: GridSpec,
    pub balanced: bool,
    /// rad
    pub analytic_phase: f64,
    /// rad
    pub grid_phase: f64,
    /// rad
    pub phase_error: f64,
    /// Largest arm-centre error relative to max(|x|, sigma0).
    pub center_error: f64,
    /// Relative error of the final width against sigma0 sqrt(1 + (omega t)^2).
    pub width_error: f64,
    pub grid_modulus: f64,
    pub analytic_modulus: f64,
    /// 1 - grid_modulus
    pub overlap_deficit: f64,
    pub norm_drift: f64,
    pub checks: Vec<Check>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const PHASE_TOL: f64 = 1e-3;
pub const CENTER_TOL: f64 = 1e-6;
pub const WIDTH_TOL: f64 = 1e-4;
pub const DEFICIT_TOL: f64 = 1e-4;
pub const MODULUS_TOL: f64 = 1e-3;
pub const NORM_TOL: f64 = 1e-9;

fn check(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check { name, value, tolerance, pass: value <= tolerance }
}

/// Grid observables at `t3` next to the analytic ones.
pub fn oracle_compare(params: &ExperimentParams, seq: &PulseSequence, spec: &GridSpec) -> Result<OracleReport> {
    let units = scale_params(params, seq)?;
    let phase = units.phase_scale().abs();
    if phase > MAX_ORACLE_PHASE {
        return Err(GridError::PhaseTooLarge { phase, limit: MAX_ORACLE_PHASE });
    }
    let arms = run_arms(&units, spec)?;
    let overlap = arms.plus.inner(&arms.minus);
    let analytic = analytic_phase(params, seq)?;
    let grid_phase = unwrap_near(overlap.arg(), analytic);

    let t3 = seq.end_time();
    let mut center_error = 0.0_f64;
    for (spin, psi) in [(SpinBranch::Plus, &arms.plus), (SpinBranch::Minus, &arms.minus)] {
        let x_cl = classical_trajectory(params, seq, spin, 0.0, 0.0).end().center / units.sigma0;
        center_error = center_error.max((psi.mean_x() - x_cl).abs() / x_cl.abs().max(1.0));
    }
    let width_law = wavepacket_width(params, t3) / units.sigma0;
    let width_error = (arms.plus.width() / width_law - 1.0).abs().max((arms.minus.width() / width_law - 1.0).abs());
    let fin = evolve_sequence(params, seq, &CompositeState::released(params, 0.0, 0.0));
    let analytic_modulus = fin.overlap_parts()?.modulus();
    let grid_modulus = overlap.norm();
    let balanced = seq.is_balanced();

    let mut checks = vec![
        check("phase_error", (grid_phase - analytic).abs(), PHASE_TOL),
        check("center_error", center_error, CENTER_TOL),
        check("width_error", width_error, WIDTH_TOL),
        check("modulus_agreement", (grid_modulus - analytic_modulus).abs(), MODULUS_TOL),
        check("norm_drift", arms.norm_drift, NORM_TOL),
    ];
    // recombination is only demanded of the sequence the arms are meant to close
    checks.push(check("overlap_deficit", 1.0 - grid_modulus, DEFICIT_TOL));
    Ok(OracleReport {
        units,
        grid: *spec,
        balanced,
        analytic_phase: analytic,
        grid_phase,
        phase_error: (grid_phase - analytic).abs(),
        center_error,
        width_error,
        grid_modulus,
        analytic_modulus,
        overlap_deficit: 1.0 - grid_modulus,
        norm_drift: arms.norm_drift,
        checks,
    })
}

/// |psi|^2 of both arms at one instant, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    /// s
    pub time: f64,
    /// m
    pub x: Vec<f64>,
    /// m^-1
    pub prob_plus: Vec<f64>,
    /// m^-1
    pub prob_minus: Vec<f64>,
}

/// Density snapshots at the requested SI times (clamped to `[0, t3]`, sorted).
pub fn snapshots(params: &ExperimentParams, seq: &PulseSequence, spec: &GridSpec, times: &[f64]) -> Result<Vec<Snapshot>> {
    let units = scale_params(params, seq)?;
    let stepper = Stepper::new(spec)?;
    let mut sorted: Vec<f64> = times.iter().map(|t| (t / units.time_unit).clamp(0.0, units.times[2])).collect();
    sorted.sort_by(f64::total_cmp);
    let mut plus = GridWavefunction::ground_state(spec, 0.0, 0.0);
    let mut minus = plus.clone();
    let mut clock = 0.0;
    let x: Vec<f64> = spec.positions().iter().map(|x| x * units.sigma0).collect();
    let mut out = Vec::with_capacity(sorted.len());
    for t in sorted {
        let (p, m) = rayon::join(
            || evolve_arm(&units, &stepper, 1, clock, t, &mut plus),
            || evolve_arm(&units, &stepper, -1, clock, t, &mut minus),
        );
        p?;
        m?;
        clock = t;
        let scale = 1.0 / units.sigma0;
        out.push(Snapshot {
            time: t * units.time_unit,
            x: x.clone(),
            prob_plus: plus.density().iter().map(|d| d * scale).collect(),
            prob_minus: minus.density().iter().map(|d| d * scale).collect(),
        });
    }
    Ok(out)
}
