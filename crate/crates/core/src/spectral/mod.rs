//! Periodic 2-D Fourier pseudo-spectral machinery on `[0, L]^2`.
//!
//! Nodal arrays are row-major `N x N`: entry `i * N + j` holds the value at
//! `(x, y) = (i dx, j dx)`. Spectral arrays use the same layout, with the
//! standard FFT ordering along each axis: index `m` carries integer mode
//! `m` for `m < N/2` and `m - N` otherwise, so the Nyquist index `N/2`
//! carries mode `-N/2`. Physical wavenumbers are the integer modes times
//! `2 pi / L`.
//!
//! The forward transform is normalized so that the mode-0 coefficient is the
//! nodal mean; the inverse is its exact inverse.

mod field;
mod snapshot;

pub use field::{divergence, gradient, Field, Spectrum};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub struct SpectralGrid {
    n: usize,
    length: f64,
    dealias: bool,
    /// Physical wavenumber per axis index (Nyquist keeps magnitude `N/2`).
    wavenumbers: Vec<f64>,
    /// Wavenumbers used for odd derivatives; Nyquist set to zero so that
    /// derivatives of real fields stay real.
    deriv_wavenumbers: Vec<f64>,
    lap_symbol: Vec<f64>,
    biharm_symbol: Vec<f64>,
    dealias_mask: Vec<bool>,
    forward_plan: Arc<dyn Fft<f64>>,
    inverse_plan: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("dealias", &self.dealias)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(n: usize, length: f64, dealias: bool) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "N must be an even integer >= 4, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "L must be positive and finite, got {length}"
            )));
        }
        let scale = 2.0 * PI / length;
        let modes: Vec<i64> = (0..n).map(|m| integer_mode(m, n)).collect();
        let wavenumbers: Vec<f64> = modes.iter().map(|&m| scale * m as f64).collect();
        let deriv_wavenumbers: Vec<f64> = modes
            .iter()
            .enumerate()
            .map(|(idx, &m)| if idx == n / 2 { 0.0 } else { scale * m as f64 })
            .collect();

        let mut lap_symbol = Vec::with_capacity(n * n);
        let mut biharm_symbol = Vec::with_capacity(n * n);
        let mut dealias_mask = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                let k2 = wavenumbers[p] * wavenumbers[p] + wavenumbers[q] * wavenumbers[q];
                lap_symbol.push(-k2);
                biharm_symbol.push(k2 * k2);
                let keep = 3 * modes[p].unsigned_abs() < n as u64
                    && 3 * modes[q].unsigned_abs() < n as u64;
                dealias_mask.push(keep);
            }
        }

        let mut planner = FftPlanner::new();
        let forward_plan = planner.plan_fft_forward(n);
        let inverse_plan = planner.plan_fft_inverse(n);

        Ok(Self {
            n,
            length,
            dealias,
            wavenumbers,
            deriv_wavenumbers,
            lap_symbol,
            biharm_symbol,
            dealias_mask,
            forward_plan,
            inverse_plan,
        })
    }

    /// Convenience constructor returning a shareable handle.
    pub fn shared(n: usize, length: f64, dealias: bool) -> Result<Arc<Self>> {
        Self::new(n, length, dealias).map(Arc::new)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Physical wavenumbers along one axis, FFT ordering.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// `-|k|^2` per mode.
    pub fn lap_symbol(&self) -> &[f64] {
        &self.lap_symbol
    }

    /// `|k|^4` per mode; the symbol of the biharmonic operator.
    pub fn biharm_symbol(&self) -> &[f64] {
        &self.biharm_symbol
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias_mask
    }

    /// Laplacian symbol at integer mode `(mx, my)`, which may be negative.
    pub fn lap_at(&self, mx: i64, my: i64) -> f64 {
        self.lap_symbol[self.mode_index(mx, my)]
    }

    /// Flat spectral index of integer mode `(mx, my)`.
    pub fn mode_index(&self, mx: i64, my: i64) -> usize {
        let n = self.n as i64;
        let p = mx.rem_euclid(n) as usize;
        let q = my.rem_euclid(n) as usize;
        p * self.n + q
    }

    /// Integer mode pair at flat spectral index.
    pub fn mode_of(&self, idx: usize) -> (i64, i64) {
        (integer_mode(idx / self.n, self.n), integer_mode(idx % self.n, self.n))
    }

    /// Nodal coordinates `(x, y)` of flat nodal index.
    pub fn node(&self, idx: usize) -> (f64, f64) {
        let dx = self.dx();
        ((idx / self.n) as f64 * dx, (idx % self.n) as f64 * dx)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: len,
            });
        }
        Ok(())
    }

    /// Nodal values to mean-normalized spectral coefficients.
    pub fn forward(&self, values: &[f64]) -> Result<Vec<Complex64>> {
        self.check_len(values.len())?;
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, &self.forward_plan);
        let scale = 1.0 / (self.len() as f64);
        for c in &mut buf {
            *c *= scale;
        }
        Ok(buf)
    }

    /// Spectral coefficients back to real nodal values. The imaginary part,
    /// pure round-off for conjugate-symmetric input, is discarded.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len())?;
        let mut buf = coeffs.to_vec();
        self.fft2(&mut buf, &self.inverse_plan);
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    fn fft2(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        transpose(buf, &mut t, n);
        plan.process_with_scratch(&mut t, &mut scratch);
        transpose(&t, buf, n);
    }

    /// Spectral gradient `(i kx c, i ky c)`.
    pub fn gradient_spectral(&self, coeffs: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        self.check_len(coeffs.len())?;
        let n = self.n;
        let mut gx = vec![Complex64::new(0.0, 0.0); n * n];
        let mut gy = vec![Complex64::new(0.0, 0.0); n * n];
        for p in 0..n {
            let kx = self.deriv_wavenumbers[p];
            for q in 0..n {
                let ky = self.deriv_wavenumbers[q];
                let c = coeffs[p * n + q];
                let ic = Complex64::new(-c.im, c.re);
                gx[p * n + q] = ic * kx;
                gy[p * n + q] = ic * ky;
            }
        }
        Ok((gx, gy))
    }

    /// Spectral divergence `i kx cx + i ky cy`.
    pub fn divergence_spectral(&self, cx: &[Complex64], cy: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(cx.len())?;
        self.check_len(cy.len())?;
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for p in 0..n {
            let kx = self.deriv_wavenumbers[p];
            for q in 0..n {
                let ky = self.deriv_wavenumbers[q];
                let s = cx[p * n + q] * kx + cy[p * n + q] * ky;
                out[p * n + q] = Complex64::new(-s.im, s.re);
            }
        }
        Ok(out)
    }

    /// Multiplier `|k|^(4 alpha)` of the fractional power `(biharmonic)^alpha`.
    /// The zero mode maps to 0 for every `alpha != 0`.
    pub fn power_symbol(&self, alpha: f64) -> Vec<f64> {
        if alpha == 0.0 {
            return vec![1.0; self.len()];
        }
        self.lap_symbol
            .iter()
            .map(|&l| if l == 0.0 { 0.0 } else { (-l).powf(2.0 * alpha) })
            .collect()
    }

    /// Squared discrete `V^alpha` norm of a spectrum, multiplier `|k|^(2 alpha)`.
    pub fn sobolev_norm_sq_spectral(&self, coeffs: &[Complex64], alpha: f64) -> f64 {
        let area = self.area();
        if alpha == 0.0 {
            return area * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        let s: f64 = coeffs
            .iter()
            .zip(&self.lap_symbol)
            .filter(|(_, &l)| l != 0.0)
            .map(|(c, &l)| (-l).powf(2.0 * alpha) * c.norm_sqr())
            .sum();
        area * s
    }

    /// Zeroes every mode outside the 2/3-rule band.
    pub fn apply_dealias(&self, coeffs: &mut [Complex64]) {
        for (c, &keep) in coeffs.iter_mut().zip(&self.dealias_mask) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn integer_mode(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 16;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(SpectralGrid::new(7, 1.0, false).is_err());
        assert!(SpectralGrid::new(2, 1.0, false).is_err());
        assert!(SpectralGrid::new(8, 0.0, false).is_err());
        assert!(SpectralGrid::new(8, -1.0, false).is_err());
    }

    #[test]
    fn max_wavenumber_on_128_grid() {
        let g = SpectralGrid::new(128, 2.0 * PI, false).unwrap();
        let kmax = g.wavenumbers().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        assert!((kmax - 64.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_examples() {
        let g = SpectralGrid::new(4, 2.0 * PI, false).unwrap();
        assert!((g.lap_at(1, 0) + 1.0).abs() < 1e-15);
        let g = SpectralGrid::new(8, 12.8, false).unwrap();
        let s = 2.0 * PI / 12.8;
        assert!((g.lap_at(1, 1) + 2.0 * s * s).abs() < 1e-14);
    }

    #[test]
    fn biharmonic_is_laplacian_squared() {
        let g = SpectralGrid::new(16, 3.0, false).unwrap();
        for (b, l) in g.biharm_symbol().iter().zip(g.lap_symbol()) {
            assert_eq!(*b, l * l);
        }
        assert_eq!(g.lap_symbol()[0], 0.0);
        assert_eq!(g.biharm_symbol()[0], 0.0);
    }

    #[test]
    fn laplacian_of_resolved_cosines() {
        let n = 16;
        let l = 5.0;
        let g = SpectralGrid::new(n, l, false).unwrap();
        for m in 0..n / 2 {
            let k = 2.0 * PI * m as f64 / l;
            let vals: Vec<f64> = (0..n * n).map(|idx| (k * g.node(idx).0).cos()).collect();
            let mut c = g.forward(&vals).unwrap();
            for (ci, s) in c.iter_mut().zip(g.lap_symbol()) {
                *ci *= *s;
            }
            let back = g.inverse(&c).unwrap();
            for (b, v) in back.iter().zip(&vals) {
                assert!((b + k * k * v).abs() < 1e-11 * (1.0 + k * k), "m={m}");
            }
        }
    }

    #[test]
    fn dealias_mask_keeps_two_thirds() {
        let g = SpectralGrid::new(12, 1.0, true).unwrap();
        assert!(g.dealias_mask()[g.mode_index(3, 3)]);
        assert!(!g.dealias_mask()[g.mode_index(4, 0)]);
        assert!(!g.dealias_mask()[g.mode_index(0, -4)]);
    }
}
