//! One-parameter sweeps over a configuration key, evaluated on a worker pool.

use rayon::prelude::*;

use nanoramsey_core::params::key_spec;

use crate::config::RunConfig;
use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Configuration key being varied.
    pub parameter: String,
    pub values: Vec<f64>,
}

fn check_parameter(name: &str) -> Result<()> {
    if key_spec(name).is_some() {
        Ok(())
    } else {
        Err(AppError::Sweep(format!("`{name}` is not a configuration key")))
    }
}

impl SweepSpec {
    pub fn explicit(parameter: &str, values: Vec<f64>) -> Result<Self> {
        check_parameter(parameter)?;
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(AppError::Sweep("need at least one finite value".into()));
        }
        Ok(Self { parameter: parameter.to_owned(), values })
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linear(parameter: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(AppError::Sweep("a range needs count >= 2".into()));
        }
        let step = (stop - start) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
        values[count - 1] = stop;
        Self::explicit(parameter, values)
    }

    /// `count` log-spaced values from `start` to `stop` inclusive (both > 0).
    pub fn log(parameter: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return Err(AppError::Sweep("log ranges need positive ends".into()));
        }
        let lin = Self::linear(parameter, start.ln(), stop.ln(), count)?;
        let mut values: Vec<f64> = lin.values.iter().map(|v| v.exp()).collect();
        values[0] = start;
        values[count - 1] = stop;
        Ok(Self { values, ..lin })
    }
}

/// Evaluates `f` on the base config with the swept key set to each value.
/// Results come back in input order whatever the worker count.
pub fn run_sweep<T, F>(base: &RunConfig, spec: &SweepSpec, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&RunConfig, f64) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Argument(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| {
        spec.values
            .par_iter()
            .map(|&v| {
                let cfg = base.with_value(&spec.parameter, v)?;
                f(&cfg, v)
            })
            .collect()
    })
}

/// Maps `f` over `items` on a pool of `workers` threads, keeping order.
pub fn par_map<I, T, F>(items: &[I], workers: usize, f: F) -> Result<Vec<T>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Argument(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let s = SweepSpec::linear("theta", 0.0, 1.0, 5).unwrap();
        assert_eq!(s.values, [0.0, 0.25, 0.5, 0.75, 1.0]);
        let s = SweepSpec::log("t3", 1e-5, 1e-4, 3).unwrap();
        assert_eq!(s.values[0], 1e-5);
        assert_eq!(s.values[2], 1e-4);
        assert!((s.values[1] / 10f64.powf(-4.5) - 1.0).abs() < 1e-12);
        assert!(SweepSpec::linear("theta", 0.0, 1.0, 1).is_err());
        assert!(SweepSpec::linear("thetta", 0.0, 1.0, 3).is_err());
        assert!(SweepSpec::log("t3", 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn order_independent_of_workers() {
        let base = RunConfig { values: Default::default(), seed: None };
        let spec = SweepSpec::linear("t3", 1.0, 64.0, 64).unwrap();
        let f = |c: &RunConfig, v: f64| Ok(c.values["t3"] * 2.0 + v);
        let one = run_sweep(&base, &spec, 1, f).unwrap();
        let many = run_sweep(&base, &spec, 8, f).unwrap();
        assert_eq!(one, many);
        assert_eq!(one[63], 192.0);
    }
}
