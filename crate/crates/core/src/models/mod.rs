//! Gradient-flow models `du/dt = -nu L u + N(u)` with `L` the biharmonic
//! operator on a periodic square.

mod init;
mod linear;
mod nss;

pub use init::{random_field, smooth_random_field};
pub use linear::LinearModel;
pub use nss::{manufactured_exact, manufactured_forcing, EpsilonConvention, NssModel};

use std::fmt;

use rustfft::num_complex::Complex64;

pub use crate::integrator::LipschitzIndices;
use crate::spectral::{Field, SpectralGrid, Spectrum};

pub trait GradientFlowModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// User-facing small parameter.
    fn epsilon(&self) -> f64;

    /// Coefficient multiplying the linear operator in the evolution equation.
    fn nu(&self) -> f64;

    fn lipschitz(&self) -> LipschitzIndices;

    /// Symbol of `L`: non-negative, zero at the zero mode.
    fn linear_symbol(&self, grid: &SpectralGrid) -> Vec<f64> {
        grid.biharm_symbol().to_vec()
    }

    /// `N(u, t)` from and to mean-normalized spectra. Time dependence is only
    /// used for manufactured forcing.
    fn nonlinear_spectral(&self, grid: &SpectralGrid, u_hat: &[Complex64], t: f64) -> Vec<Complex64>;

    fn nonlinear(&self, u: &Field, t: f64) -> Field {
        let s = u.spectrum();
        let out = self.nonlinear_spectral(u.grid(), s.coeffs(), t);
        Spectrum::new(u.grid().clone(), out)
            .expect("model returns a full spectrum")
            .to_field()
    }

    fn energy(&self, u: &Field) -> f64;

    /// Whether `N` has zero mean, so the stepper may pin the zero mode.
    fn conserves_mean(&self) -> bool {
        true
    }
}

/// `(nu / 2) ||Delta u||^2` evaluated spectrally.
pub(crate) fn quadratic_energy(grid: &SpectralGrid, u_hat: &[Complex64], nu: f64) -> f64 {
    let s: f64 = u_hat
        .iter()
        .zip(grid.biharm_symbol())
        .map(|(c, b)| b * c.norm_sqr())
        .sum();
    0.5 * nu * grid.area() * s
}
