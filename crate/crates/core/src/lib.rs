//! Stabilized exponential time differencing multistep schemes for gradient
//! flows on periodic squares, with the no-slope-selection epitaxial growth
//! model as the main application.
//!
//! ```no_run
//! use std::sync::Arc;
//! use etdms::{build_stepper, manufactured_exact, NssModel, SpectralGrid, StepperConfig};
//!
//! let grid = SpectralGrid::shared(128, 2.0 * std::f64::consts::PI, false)?;
//! let model = NssModel::new(0.01)?.with_manufactured_forcing(grid.clone())?;
//! let mut state = build_stepper(grid.clone(), Arc::new(model), &StepperConfig::new(4, 1e-3))?;
//! state.set_initial(&manufactured_exact(0.0, grid.clone())?, 0.0)?;
//! state.advance(1000)?;
//! let err = state.field().sub(&manufactured_exact(state.t(), grid)?)?.l2_norm();
//! # Ok::<(), etdms::Error>(())
//! ```

pub mod diagnostics;
mod error;
pub mod integrator;
pub mod models;
pub mod quadrature;
pub mod spectral;

pub use diagnostics::{
    fit_loglog, fit_semilog, lipschitz_ratio, mean_slope, modified_energy, roughness, FitResult,
    TimeSeriesRecord,
};
pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
pub use integrator::{
    build_stepper, run_schedule, LagrangeTable, LipschitzIndices, NonlinearWeighting, ParamChoice,
    Schedule, Segment, StabilizationParams, StepKind, StepperConfig, StepperState,
};
pub use models::{
    manufactured_exact, manufactured_forcing, random_field, smooth_random_field, EpsilonConvention,
    GradientFlowModel, LinearModel, NssModel,
};
pub use spectral::{read_snapshot, write_snapshot, Field, Snapshot, SpectralGrid, Spectrum};
