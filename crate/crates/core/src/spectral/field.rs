use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::SpectralGrid;
use crate::error::{Error, Result};

/// Relative tolerance under which a field counts as mean-zero.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Real nodal field on a shared grid.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
}

/// Mean-normalized spectral coefficients of a real field.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<SpectralGrid>,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn constant(grid: Arc<SpectralGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        Self { grid, values }
    }

    /// Samples `f(x, y)` at the grid nodes.
    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.node(idx);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean().abs() <= MEAN_ZERO_TOL * self.max_abs()
    }

    /// Subtracts the nodal mean.
    pub fn project_mean_zero(&mut self) {
        let m = self.mean();
        for v in &mut self.values {
            *v -= m;
        }
    }

    fn ensure_mean_zero(&self) -> Result<()> {
        if self.is_mean_zero() {
            Ok(())
        } else {
            Err(Error::NonZeroMean { mean: self.mean() })
        }
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.n() == other.grid.n() && self.grid.length() == other.grid.length())
        {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Field { grid: self.grid.clone(), values })
    }

    pub fn spectrum(&self) -> Spectrum {
        let coeffs = self
            .grid
            .forward(&self.values)
            .expect("field length matches its grid");
        Spectrum { grid: self.grid.clone(), coeffs }
    }

    /// Applies `L^alpha` with `L` the biharmonic operator (multiplier `|k|^(4 alpha)`).
    pub fn apply_power(&self, alpha: f64) -> Result<Field> {
        if alpha < 0.0 {
            self.ensure_mean_zero()?;
        }
        if alpha == 0.0 {
            return Ok(self.clone());
        }
        let mut s = self.spectrum();
        for (c, m) in s.coeffs.iter_mut().zip(self.grid.power_symbol(alpha)) {
            *c *= m;
        }
        Ok(s.to_field())
    }

    /// Discrete `V^alpha` norm `||L^(alpha/2) f||`, computed by Parseval.
    /// `alpha = 0` is the discrete L2 norm, i.e. nodal RMS times `L`.
    pub fn sobolev_norm(&self, alpha: f64) -> Result<f64> {
        if alpha < 0.0 {
            self.ensure_mean_zero()?;
        }
        let s = self.spectrum();
        Ok(self.grid.sobolev_norm_sq_spectral(&s.coeffs, alpha).sqrt())
    }

    /// Nodal discrete L2 norm `sqrt(dx^2 sum |f|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let dx = self.grid.dx();
        (dx * dx * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

impl Spectrum {
    pub fn new(grid: Arc<SpectralGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn to_field(&self) -> Field {
        let values = self
            .grid
            .inverse(&self.coeffs)
            .expect("spectrum length matches its grid");
        Field { grid: self.grid.clone(), values }
    }
}

/// Spectral gradient of a real field.
pub fn gradient(f: &Field) -> (Field, Field) {
    let s = f.spectrum();
    let (gx, gy) = f.grid.gradient_spectral(&s.coeffs).expect("length checked");
    let grid = f.grid.clone();
    let fx = Field { grid: grid.clone(), values: grid.inverse(&gx).expect("length checked") };
    let fy = Field { grid: grid.clone(), values: grid.inverse(&gy).expect("length checked") };
    (fx, fy)
}

/// Spectral divergence of the vector field `(fx, fy)`.
pub fn divergence(fx: &Field, fy: &Field) -> Result<Field> {
    fx.check_grid(fy)?;
    let grid = fx.grid.clone();
    let cx = grid.forward(&fx.values)?;
    let cy = grid.forward(&fy.values)?;
    let d = grid.divergence_spectral(&cx, &cy)?;
    Ok(Field { values: grid.inverse(&d)?, grid })
}
