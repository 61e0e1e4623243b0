//! The computations behind each subcommand, returning data rather than text
//! so the same values can be checked against direct library calls.

use nanoramsey_core::budget::{budget_report, BudgetReport};
use nanoramsey_core::collective::{collective_final_state, collective_ramsey_signal};
use nanoramsey_core::decoherence::{localization_rate, visibility, visibility_surface, BlackbodyFamily, VisibilitySurface};
use nanoramsey_core::dynamics::{evolve_sequence, gravitational_phase, ramsey_probability, thermal_phase_invariance};
use nanoramsey_core::kinematics::max_separation;
use nanoramsey_core::wavepacket::{relative_phase, wavepacket_width, CompositeState};
use nanoramsey_core::{ExperimentParams, PulseSequence};

use crate::config::RunConfig;
use crate::error::{AppError, Result};
use crate::grid::{oracle_compare, scale_params, snapshots, GridSpec, OracleReport};
use crate::output::{Cell, Table};
use crate::sweep::{par_map, run_sweep, SweepSpec};

/// Default thermal ensemble size.
pub const DEFAULT_SAMPLES: usize = 1000;
/// Default largest grid time step, natural units.
pub const DEFAULT_GRID_DT: f64 = 0.01;

/// Interferometer phase: the closed-form route for balanced sequences, the
/// overlap argument of the evolved arms otherwise.
pub fn interferometer_phase(params: &ExperimentParams, seq: &PulseSequence) -> Result<f64> {
    if seq.is_balanced() {
        Ok(gravitational_phase(params, seq)?)
    } else {
        let fin = evolve_sequence(params, seq, &CompositeState::released(params, 0.0, 0.0));
        Ok(relative_phase(&fin)?)
    }
}

/// Quantities a sweep can report, one column each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    PhiG,
    P0,
    DeltaXMax,
    Visibility,
    SpreadRatio,
    ZeemanSplitting,
    ResolvabilityRatio,
    CslBound,
    LocalizationRate,
    DecoherenceVisibility,
    ThermalPhaseSpread,
    ThermalVisibility,
}

impl Observable {
    pub const ALL: [Observable; 12] = [
        Observable::PhiG,
        Observable::P0,
        Observable::DeltaXMax,
        Observable::Visibility,
        Observable::SpreadRatio,
        Observable::ZeemanSplitting,
        Observable::ResolvabilityRatio,
        Observable::CslBound,
        Observable::LocalizationRate,
        Observable::DecoherenceVisibility,
        Observable::ThermalPhaseSpread,
        Observable::ThermalVisibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::PhiG => "phi_g_rad",
            Observable::P0 => "p0",
            Observable::DeltaXMax => "delta_x_max_m",
            Observable::Visibility => "overlap_modulus",
            Observable::SpreadRatio => "spread_ratio",
            Observable::ZeemanSplitting => "zeeman_splitting_hz",
            Observable::ResolvabilityRatio => "resolvability_ratio",
            Observable::CslBound => "csl_bound_per_s",
            Observable::LocalizationRate => "localization_rate_per_s",
            Observable::DecoherenceVisibility => "decoherence_visibility",
            Observable::ThermalPhaseSpread => "thermal_phase_spread_rad",
            Observable::ThermalVisibility => "thermal_visibility",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim();
        Self::ALL
            .into_iter()
            .find(|o| o.name() == key || o.name().starts_with(&format!("{key}_")))
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|o| o.name()).collect();
                AppError::Argument(format!("unknown output `{key}`; choose from {}", names.join(", ")))
            })
    }

    fn needs_seed(self) -> bool {
        matches!(self, Observable::ThermalPhaseSpread | Observable::ThermalVisibility)
    }
}

fn n_samples(cfg: &RunConfig) -> usize {
    cfg.values.get("n_samples").map_or(DEFAULT_SAMPLES, |n| n.max(1.0) as usize)
}

fn evaluate(cfg: &RunConfig, outputs: &[Observable], seed: Option<u64>) -> Result<Vec<Cell>> {
    let params = cfg.params()?;
    let seq = cfg.sequence(&params)?;
    let mut phase = None;
    let mut report: Option<BudgetReport> = None;
    let mut thermal = None;
    let mut row = Vec::with_capacity(outputs.len());
    for &o in outputs {
        let value = match o {
            Observable::PhiG | Observable::P0 => {
                let phi = match phase {
                    Some(p) => p,
                    None => *phase.insert(interferometer_phase(&params, &seq)?),
                };
                if o == Observable::PhiG {
                    phi
                } else {
                    ramsey_probability(phi)
                }
            }
            Observable::DeltaXMax => max_separation(&params, &seq),
            Observable::Visibility => {
                let fin = evolve_sequence(&params, &seq, &CompositeState::released(&params, 0.0, 0.0));
                fin.overlap_parts()?.modulus()
            }
            Observable::SpreadRatio => wavepacket_width(&params, seq.end_time()) / params.sigma0(),
            Observable::ZeemanSplitting | Observable::ResolvabilityRatio | Observable::CslBound => {
                let r = match &report {
                    Some(r) => r,
                    None => report.insert(budget_report(&params, &seq)?),
                };
                match o {
                    Observable::ZeemanSplitting => r.zeeman_splitting,
                    Observable::ResolvabilityRatio => r.resolvability_ratio,
                    _ => r.csl_bound,
                }
            }
            Observable::LocalizationRate | Observable::DecoherenceVisibility => {
                let model = BlackbodyFamily::from_config(&params, &cfg.values).model_at(params.t_internal)?;
                let eta = localization_rate(&model, max_separation(&params, &seq))?;
                if o == Observable::LocalizationRate {
                    eta
                } else {
                    visibility(eta, seq.end_time())
                }
            }
            Observable::ThermalPhaseSpread | Observable::ThermalVisibility => {
                let seed = seed.ok_or(AppError::MissingSeed("thermal outputs"))?;
                let r = match &thermal {
                    Some(r) => r,
                    None => thermal.insert(thermal_phase_invariance(&params, &seq, n_samples(cfg), params.t_cm, seed)?),
                };
                if o == Observable::ThermalPhaseSpread {
                    r.phase_spread
                } else {
                    r.visibility_mean
                }
            }
        };
        row.push(Cell::Num(value));
    }
    Ok(row)
}

/// Table with the swept value followed by one column per output.
pub fn sweep_table(
    base: &RunConfig,
    spec: &SweepSpec,
    outputs: &[Observable],
    workers: usize,
    seed: Option<u64>,
) -> Result<Table> {
    if outputs.is_empty() {
        return Err(AppError::Argument("no outputs requested".into()));
    }
    if seed.is_none() && outputs.iter().any(|o| o.needs_seed()) {
        return Err(AppError::MissingSeed("thermal outputs"));
    }
    let rows = run_sweep(base, spec, workers, |cfg, v| {
        let mut row = vec![Cell::Num(v)];
        row.extend(evaluate(cfg, outputs, seed)?);
        Ok(row)
    })?;
    let mut table = Table::new(std::iter::once(spec.parameter.clone()).chain(outputs.iter().map(|o| o.name().to_owned())));
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

/// Fringe: phase, readout probability and maximum separation against the swept key.
pub fn fringe_table(base: &RunConfig, spec: &SweepSpec, workers: usize) -> Result<Table> {
    sweep_table(base, spec, &[Observable::PhiG, Observable::P0, Observable::DeltaXMax], workers, None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceAxes {
    pub dx_min: f64,
    pub dx_max: f64,
    pub dx_count: usize,
    pub t_int_min: f64,
    pub t_int_max: f64,
    pub t_int_count: usize,
    /// s; the run's t3 when absent
    pub flight_time: Option<f64>,
}

impl Default for SurfaceAxes {
    fn default() -> Self {
        Self { dx_min: 1e-8, dx_max: 1e-6, dx_count: 50, t_int_min: 10.0, t_int_max: 2000.0, t_int_count: 50, flight_time: None }
    }
}

impl SurfaceAxes {
    /// Log-spaced separations and linearly spaced temperatures.
    pub fn axes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let dx = SweepSpec::log("t3", self.dx_min, self.dx_max, self.dx_count).map_err(|_| {
            AppError::Argument("separation axis needs 0 < dx-min, 0 < dx-max and count >= 2".into())
        })?;
        let t = SweepSpec::linear("t3", self.t_int_min, self.t_int_max, self.t_int_count)
            .map_err(|_| AppError::Argument("temperature axis needs count >= 2".into()))?;
        if self.t_int_min < 0.0 {
            return Err(AppError::Argument("temperatures must be >= 0".into()));
        }
        Ok((dx.values, t.values))
    }
}

/// Visibility surface over separation and internal temperature. Rows are
/// computed in parallel, each by the library surface routine.
pub fn visibility_for(cfg: &RunConfig, axes: &SurfaceAxes, workers: usize) -> Result<VisibilitySurface> {
    let params = cfg.params()?;
    let family = BlackbodyFamily::from_config(&params, &cfg.values);
    let flight = axes.flight_time.unwrap_or(params.t3);
    let (dx, t) = axes.axes()?;
    let rows = par_map(&t, workers, |&temp| Ok(visibility_surface(&family, &dx, &[temp], flight)?.visibility.remove(0)))?;
    Ok(VisibilitySurface { delta_x_axis: dx, t_int_axis: t, visibility: rows, flight_time: flight })
}

/// Matrix layout: first column the temperature, header the separations.
pub fn surface_table(s: &VisibilitySurface) -> Table {
    let mut table = Table::new(
        std::iter::once("t_int_K\\delta_x_m".to_owned()).chain(s.delta_x_axis.iter().map(|v| crate::output::format_number(*v))),
    );
    for (t, row) in s.t_int_axis.iter().zip(&s.visibility) {
        table.push(std::iter::once(Cell::Num(*t)).chain(row.iter().map(|v| Cell::Num(*v))).collect());
    }
    table
}

/// Sector table for `l` spins after a balanced run.
pub fn dicke_table(cfg: &RunConfig, l: Option<u32>) -> Result<Table> {
    let params = cfg.params()?;
    let seq = cfg.sequence(&params)?;
    let l = match l {
        Some(l) => l,
        None => cfg.values.get("n_nv").map_or(1, |v| *v as u32),
    };
    let st = collective_final_state(&params, &seq, l)?;
    let p0 = collective_ramsey_signal(l, st.phi_g);
    let amps = st.decomposition();
    let mut table = Table::new(["n", "M", "multiplicity", "amplitude", "phase_rad", "twisting_rad", "p0_per_spin"]);
    for (s, a) in st.sector_phases.iter().zip(&amps.sectors) {
        table.push(vec![
            Cell::Int(i64::from(s.n)),
            Cell::Int(i64::from(s.collective_value)),
            Cell::Int(s.multiplicity as i64),
            Cell::Num(a.amplitude.norm()),
            Cell::Num(s.phase),
            Cell::Num(s.twisting),
            Cell::Num(p0),
        ]);
    }
    Ok(table)
}

pub fn budget(cfg: &RunConfig) -> Result<BudgetReport> {
    let params = cfg.params()?;
    let seq = cfg.sequence(&params)?;
    Ok(budget_report(&params, &seq)?)
}

pub fn budget_table(r: &BudgetReport) -> Table {
    let mut t = Table::new(["quantity", "value"]);
    let rows: [(&str, Cell); 16] = [
        ("csl_bound_per_s", r.csl_bound.into()),
        ("csl_bound_from_mass_per_s", r.csl_bound_from_mass.into()),
        ("adler_excess", r.adler_excess.into()),
        ("doppler_linewidth_hz", r.doppler_linewidth.into()),
        ("doppler_velocity_m_per_s", r.doppler_velocity.into()),
        ("doppler_to_linewidth", r.doppler_to_linewidth.into()),
        ("thermal_velocity_m_per_s", r.thermal_velocity.into()),
        ("zeeman_splitting_hz", r.zeeman_splitting.into()),
        ("pulse_bandwidth_hz", r.pulse_bandwidth.into()),
        ("resolvability_ratio", r.resolvability_ratio.into()),
        ("resolvable", r.resolvable.into()),
        ("closed", r.closed.into()),
        ("max_separation_m", r.max_separation.into()),
        ("max_separation_printed_m", r.max_separation_printed.into()),
        ("max_separation_quoted_m", r.max_separation_quoted.into()),
        ("spread_ratio", r.spread_ratio.into()),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v]);
    }
    t
}

pub fn budget_text(r: &BudgetReport) -> String {
    let mut s = String::new();
    for row in &budget_table(r).rows {
        s.push_str(&format!("{:<28} {}\n", row[0].render(), row[1].render()));
    }
    for n in &r.notes {
        s.push_str(&format!(
            "note: {} computed {} vs quoted {} ({})\n",
            n.quantity,
            crate::output::format_number(n.computed),
            crate::output::format_number(n.quoted),
            n.comment
        ));
    }
    s.push_str(if r.all_pass() { "status: pass\n" } else { "status: FAIL\n" });
    s
}

/// Runs the grid oracle on an automatically sized grid.
pub fn certify(cfg: &RunConfig, dt: f64) -> Result<OracleReport> {
    let params = cfg.params()?;
    let seq = cfg.sequence(&params)?;
    let units = scale_params(&params, &seq)?;
    let spec = GridSpec::auto(&units, dt);
    Ok(oracle_compare(&params, &seq, &spec)?)
}

pub fn certify_text(r: &OracleReport) -> String {
    let mut s = format!(
        "grid {} points on [{:.3}, {:.3}], dt {}\nanalytic phase {} rad, grid phase {} rad\n",
        r.grid.n_points,
        r.grid.x_min,
        r.grid.x_max,
        r.grid.dt,
        crate::output::format_number(r.analytic_phase),
        crate::output::format_number(r.grid_phase),
    );
    for c in &r.checks {
        s.push_str(&format!(
            "{} {:<18} {} <= {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            crate::output::format_number(c.value),
            c.tolerance
        ));
    }
    s
}

pub fn certify_table(r: &OracleReport) -> Table {
    let mut t = Table::new(["check", "value", "tolerance", "pass"]);
    for c in &r.checks {
        t.push(vec![c.name.into(), c.value.into(), c.tolerance.into(), c.pass.into()]);
    }
    t
}

/// Long-format density table `(time_s, x_m, prob_plus, prob_minus)`.
pub fn snapshot_table(cfg: &RunConfig, times: &[f64], dt: f64) -> Result<Table> {
    let params = cfg.params()?;
    let seq = cfg.sequence(&params)?;
    let units = scale_params(&params, &seq)?;
    let spec = GridSpec::auto(&units, dt);
    let snaps = snapshots(&params, &seq, &spec, times)?;
    let mut t = Table::new(["time_s", "x_m", "prob_plus_per_m", "prob_minus_per_m"]);
    for s in &snaps {
        for i in 0..s.x.len() {
            t.push(vec![s.time.into(), s.x[i].into(), s.prob_plus[i].into(), s.prob_minus[i].into()]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observable_names_round_trip() {
        for o in Observable::ALL {
            assert_eq!(Observable::parse(o.name()).unwrap(), o);
        }
        assert_eq!(Observable::parse("phi_g").unwrap(), Observable::PhiG);
        assert!(Observable::parse("bogus").is_err());
    }
}
