use std::path::PathBuf;

use nanoramsey_core::Error as CoreError;

use crate::grid::GridError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error("config is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config key `{0}` must be a number")]
    NotNumeric(String),
    #[error("config key `{key}` must be a table of numbers, not a nested table")]
    Nested { key: String },
    #[error("seed must be a non-negative integer")]
    Seed,
    #[error("`{0}` draws random samples and needs a seed (--seed or `seed` in the config)")]
    MissingSeed(&'static str),
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

fn core_is_validation(e: &CoreError) -> bool {
    !matches!(
        e,
        CoreError::PhaseRouteMismatch { .. } | CoreError::MismatchedBranches | CoreError::Quadrature { .. }
    )
}

impl AppError {
    /// 1 for bad input, 2 for numerical or certification failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) => {
                if core_is_validation(e) {
                    EXIT_VALIDATION
                } else {
                    EXIT_FAILURE
                }
            }
            AppError::Grid(GridError::Core(e)) if core_is_validation(e) => EXIT_VALIDATION,
            AppError::Grid(GridError::PhaseTooLarge { .. } | GridError::InvalidSpec(_)) => EXIT_VALIDATION,
            AppError::Grid(_) | AppError::Write(_) | AppError::Csv(_) | AppError::Json(_) => EXIT_FAILURE,
            _ => EXIT_VALIDATION,
        }
    }
}
