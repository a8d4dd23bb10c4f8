use crate::error::{Error, Result};

pub const DEFAULT_FIT_WINDOW: (f64, f64) = (1.0, 400.0);
pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares fit `y = a ln t + b` or `y = a t^b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub window: (f64, f64),
    /// RMS misfit in the fitted coordinates.
    pub residual: f64,
    pub samples: usize,
}

fn windowed(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: t.len(), actual: y.len() });
    }
    if !(window.0 < window.1) || !(window.0 > 0.0) {
        return Err(Error::InvalidFit(format!("window [{}, {}] is empty or not positive", window.0, window.1)));
    }
    let (ts, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if ts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidFit(format!(
            "{} samples in window, need at least {MIN_FIT_SAMPLES}",
            ts.len()
        )));
    }
    Ok((ts, ys))
}

/// Returns slope, intercept and RMS residual.
fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidFit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

pub fn fit_semilog(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<FitResult> {
    let (ts, ys) = windowed(t, y, window)?;
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let (a, b, residual) = least_squares(&x, &ys)?;
    Ok(FitResult { a, b, window, residual, samples: ts.len() })
}

pub fn fit_loglog(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<FitResult> {
    let (ts, ys) = windowed(t, y, window)?;
    if let Some(bad) = ys.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidFit(format!("non-positive value {bad} under logarithm")));
    }
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (b, ln_a, residual) = least_squares(&x, &ly)?;
    Ok(FitResult { a: ln_a.exp(), b, window, residual, samples: ts.len() })
}
