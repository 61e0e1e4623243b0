#![allow(dead_code)]

use std::f64::consts::PI;

use nanoramsey::grid::GridSpec;
use nanoramsey_core::params::{build_params, ConfigMap};
use nanoramsey_core::ExperimentParams;
use rustfft::num_complex::Complex64;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const MU_B: f64 = 9.274_010_078_3e-24;
pub const G: f64 = 9.806_65;
pub const G_NV: f64 = 2.0028;

pub fn config(pairs: &[(&str, f64)]) -> ConfigMap {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn paper_config() -> ConfigMap {
    config(&[
        ("mass", 1.25e-17),
        ("radius", 1e-7),
        ("b_gradient", 1e7),
        ("theta", 0.0),
        ("t3", 1e-4),
        ("trap_omega", 1e5),
        ("t_internal", 400.0),
        ("t_environment", 300.0),
        ("t_cm", 1e-3),
        ("mw_frequency", 2.87e9),
        ("pulse_duration", 1e-8),
    ])
}

pub fn paper_params() -> ExperimentParams {
    build_params(&paper_config()).unwrap()
}

/// SI problem whose natural-unit version has spin acceleration `a_spin`,
/// gravity component `a_grav` and flight time `t3_scaled`.
pub fn desk_params(a_spin: f64, a_grav: f64, t3_scaled: f64, mass: f64, omega: f64) -> ExperimentParams {
    let s0 = (HBAR / (2.0 * mass * omega)).sqrt();
    let tu = mass * s0 * s0 / HBAR;
    let b = a_spin * mass * s0 / (tu * tu * G_NV * MU_B);
    let cos_theta = a_grav * s0 / (G * tu * tu);
    assert!(cos_theta <= 1.0);
    build_params(&config(&[
        ("mass", mass),
        ("b_gradient", b),
        ("theta", cos_theta.acos()),
        ("t3", t3_scaled * tu),
        ("trap_omega", omega),
        ("t_internal", 300.0),
        ("t_environment", 300.0),
        ("t_cm", 1e-6),
        ("mw_frequency", 2.87e9),
        ("pulse_duration", 1e-8),
    ]))
    .unwrap()
}

pub fn free_spec(dt: f64) -> GridSpec {
    GridSpec { n_points: 1024, x_min: -60.0, x_max: 100.0, dt, steps_per_segment: 1 }
}

/// Exact wavefunction of the trap ground state released at rest into
/// H = p^2/2 - F x (m = hbar = sigma0 = 1), sampled on the grid.
pub fn exact_linear(spec: &GridSpec, force: f64, t: f64) -> Vec<Complex64> {
    let q = Complex64::new(1.0, t / 2.0);
    let pre = (2.0 * PI).powf(-0.25) / q.sqrt();
    spec.positions()
        .iter()
        .map(|&x| {
            let y = x - force * t * t / 2.0;
            let env = pre * (-(y * y) / (4.0 * q)).exp();
            env * Complex64::from_polar(1.0, force * t * x - force * force * t * t * t / 6.0)
        })
        .collect()
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
