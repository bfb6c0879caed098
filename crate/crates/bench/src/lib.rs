//! Monte Carlo study harness: bias and RMSE against `k`, parameter-grid
//! sweeps and spatial `m` sweeps, with tidy CSV output.

pub mod config;
pub mod layout;
pub mod metrics;
pub mod study;

pub use study::{
    run_bias_rmse_vs_k, run_parameter_grid, run_spatial_study, run_study, Metric, StudyKind, StudyResult, StudySpec,
};
pub use tailfit_core::{
    FitOptions, Margins, Noise, Rectangle, SimModel, SimSpec, SpatialMethod, TailError, TailFamily, ThetaVector,
    WeightPreset, ZetaProfile,
};

#[derive(Debug, thiserror::Error)]
pub enum StudyError {
    #[error("invalid study: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Core(#[from] TailError),
    #[error("config parse error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, StudyError>;
