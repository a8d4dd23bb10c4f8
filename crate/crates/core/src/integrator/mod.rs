//! The stabilized `k`-th order ETD multistep integrator.
//!
//! Each step solves, mode by mode,
//! `(1 + A tau^k L^p) du/dt + nu L u = sum_i l_i(t - t_n) N(u^{n-i})`
//! over one interval through its integrating factor, with the nonlinear
//! history extrapolated by the shifted Lagrange basis. All operators are
//! diagonal in Fourier space and precomputed per step size.

mod constants;
mod etdrk4;
mod lagrange;
mod phi;
mod schedule;
mod stepper;

pub use constants::{
    cbar_constants, cstar_constants, cstar_squared_exact, reference_order_four_a, LipschitzIndices,
    StabilizationParams,
};
pub use etdrk4::Etdrk4Coefficients;
pub use lagrange::{LagrangeTable, MAX_ORDER};
pub use phi::{phi_into, phi_into_with_cutoff, phi_values, SERIES_CUTOFF};
pub use schedule::{run_schedule, Schedule, Segment};
pub use stepper::{
    build_stepper, IntervalRecord, NonlinearWeighting, ParamChoice, StepKind, StepperConfig,
    StepperState,
};
