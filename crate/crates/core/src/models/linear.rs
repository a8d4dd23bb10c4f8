use rustfft::num_complex::Complex64;

use super::{quadratic_energy, GradientFlowModel, LipschitzIndices};
use crate::error::{Error, Result};
use crate::spectral::{Field, SpectralGrid};

/// Pure linear decay `du/dt = -nu Delta^2 u`, i.e. `N = 0`.
#[derive(Clone, Debug)]
pub struct LinearModel {
    nu: f64,
}

impl LinearModel {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be >= 0, got {nu}")));
        }
        Ok(Self { nu })
    }
}

impl GradientFlowModel for LinearModel {
    fn name(&self) -> &str {
        "linear"
    }

    fn epsilon(&self) -> f64 {
        self.nu
    }

    fn nu(&self) -> f64 {
        self.nu
    }

    fn lipschitz(&self) -> LipschitzIndices {
        LipschitzIndices { beta: 0.5, gamma: 0.5, c_l: 1.0 }
    }

    fn nonlinear_spectral(&self, grid: &SpectralGrid, _u_hat: &[Complex64], _t: f64) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); grid.len()]
    }

    fn energy(&self, u: &Field) -> f64 {
        quadratic_energy(u.grid(), u.spectrum().coeffs(), self.nu)
    }
}
