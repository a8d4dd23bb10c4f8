use crate::error::{Error, Result};
use crate::integrator::StepperState;
use crate::models::GradientFlowModel;
use crate::spectral::{gradient, Field};

/// One row of the time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub energy: f64,
    pub roughness: f64,
    pub slope: f64,
    pub modified_energy: Option<f64>,
}

/// Root-mean-square deviation of `u` from its mean.
pub fn roughness(u: &Field) -> f64 {
    let mean = u.mean();
    let n = u.values().len() as f64;
    (u.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Root-mean-square of `|grad u|`.
pub fn mean_slope(u: &Field) -> f64 {
    let (gx, gy) = gradient(u);
    let n = u.values().len() as f64;
    let s: f64 = gx.values().iter().zip(gy.values()).map(|(a, b)| a * a + b * b).sum();
    (s / n).sqrt()
}

/// Energy, roughness and slope of the current state, without the modified energy.
pub fn record(state: &StepperState) -> TimeSeriesRecord {
    let u = state.field();
    TimeSeriesRecord {
        t: state.t(),
        energy: state.model().energy(&u),
        roughness: roughness(&u),
        slope: mean_slope(&u),
        modified_energy: None,
    }
}

/// `||N(u) - N(v)||_{V^-beta} / ||u - v||_{V^gamma}` using the model's own indices.
pub fn lipschitz_ratio(model: &dyn GradientFlowModel, u: &Field, v: &Field) -> Result<f64> {
    let lip = model.lipschitz();
    let du = u.sub(v)?;
    let den = du.sobolev_norm(lip.gamma)?;
    if den == 0.0 {
        return Err(Error::IdenticalFields);
    }
    let dn = model.nonlinear(u, 0.0).sub(&model.nonlinear(v, 0.0))?;
    Ok(dn.sobolev_norm(-lip.beta)? / den)
}
