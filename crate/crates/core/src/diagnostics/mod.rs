//! Observables of a running simulation and tools for checking scaling laws.

mod fit;
mod modified;
mod observables;

pub use fit::{fit_loglog, fit_semilog, FitResult, DEFAULT_FIT_WINDOW, MIN_FIT_SAMPLES};
pub use modified::{assemble_modified_energy, modified_energy, modified_energy_terms, ModifiedEnergy, DEFAULT_QUAD_POINTS};
pub use observables::{lipschitz_ratio, mean_slope, record, roughness, TimeSeriesRecord};
