//! The functions `phi_j(z) = int_0^tau e^{-z (tau - s)} s^j ds`.
//!
//! For `z tau` below [`SERIES_CUTOFF`] the Taylor series of
//! `tau^{j+1} int_0^1 e^{-z tau (1 - sigma)} sigma^j d sigma` is summed; above
//! it the recurrence `phi_0 = (1 - e^{-z tau}) / z`,
//! `phi_j = (tau^j - j phi_{j-1}) / z` is used. The recurrence amplifies the
//! relative error of `phi_0` by roughly `j! / (z tau)^j`, so the cutoff has
//! to sit well above the point where the subtraction in `phi_0` alone would
//! lose digits.

use crate::error::{Error, Result};

pub const SERIES_CUTOFF: f64 = 2.0;
const SERIES_RTOL: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 400;

/// `phi_0 .. phi_{count-1}` at `z >= 0`, step `tau > 0`.
pub fn phi_values(z: f64, tau: f64, count: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; count];
    phi_into(z, tau, &mut out)?;
    Ok(out)
}

/// In-place variant of [`phi_values`]; fills `out.len()` entries.
pub fn phi_into(z: f64, tau: f64, out: &mut [f64]) -> Result<()> {
    phi_into_with_cutoff(z, tau, out, SERIES_CUTOFF)
}

pub fn phi_into_with_cutoff(z: f64, tau: f64, out: &mut [f64], cutoff: f64) -> Result<()> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("phi argument must be >= 0, got {z}")));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {tau}")));
    }
    let x = z * tau;
    if x < cutoff {
        let mut tp = tau;
        for (j, o) in out.iter_mut().enumerate() {
            *o = tp * normalized_series(j, x);
            tp *= tau;
        }
    } else {
        let mut prev = -(-x).exp_m1() / z;
        let mut tp = 1.0;
        for (j, o) in out.iter_mut().enumerate() {
            if j > 0 {
                tp *= tau;
                prev = (tp - j as f64 * prev) / z;
            }
            *o = prev;
        }
    }
    Ok(())
}

/// `int_0^1 e^{-x (1 - sigma)} sigma^j d sigma = sum_m (-x)^m j! / (m + j + 1)!`.
fn normalized_series(j: usize, x: f64) -> f64 {
    let mut term = 1.0 / (j as f64 + 1.0);
    let mut sum = term;
    for m in 1..SERIES_MAX_TERMS {
        term *= -x / (m + j + 1) as f64;
        sum += term;
        if term.abs() < SERIES_RTOL * sum.abs() {
            break;
        }
    }
    sum
}
