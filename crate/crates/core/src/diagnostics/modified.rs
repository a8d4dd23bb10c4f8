use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{phi_into, IntervalRecord, StepperState};
use crate::quadrature::gauss_legendre_on;

pub const DEFAULT_QUAD_POINTS: usize = 6;

/// The modified energy and the interval integrals it is built from.
#[derive(Clone, Debug, PartialEq)]
pub struct ModifiedEnergy {
    pub energy: f64,
    /// `||du/dt||^2` integrated over each retained interval, newest first.
    pub h_terms: Vec<f64>,
    /// The same with the `V^p` norm.
    pub vp_terms: Vec<f64>,
    pub value: f64,
}

/// `E + C_L C3 sum_j Cbar_j h_j + C_L C4 tau^k sum_j Cbar_j v_j`, `j = 1..k-1`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_modified_energy(
    energy: f64,
    h_terms: &[f64],
    vp_terms: &[f64],
    c_l: f64,
    c3: f64,
    c4: f64,
    cbar: &[f64],
    tau_k: f64,
) -> f64 {
    let mut e = energy;
    for (j, (h, v)) in h_terms.iter().zip(vp_terms).enumerate() {
        let cb = cbar[j + 1];
        e += c_l * c3 * cb * h + c_l * c4 * tau_k * cb * v;
    }
    e
}

pub fn modified_energy(state: &StepperState, quad_points: usize) -> Result<f64> {
    Ok(modified_energy_terms(state, quad_points)?.value)
}

pub fn modified_energy_terms(state: &StepperState, quad_points: usize) -> Result<ModifiedEnergy> {
    let k = state.order();
    let need = k - 1;
    if state.intervals().len() < need {
        return Err(Error::InsufficientIntervals { have: state.intervals().len(), need });
    }
    if quad_points == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one point".into()));
    }
    let energy = state.model().energy(&state.field());
    let mut h_terms = Vec::with_capacity(need);
    let mut vp_terms = Vec::with_capacity(need);
    for rec in state.intervals().iter().take(need) {
        let (h, v) = interval_norms(state, rec, quad_points);
        h_terms.push(h);
        vp_terms.push(v);
    }
    let params = state.params();
    let tau_k = state.tau().powi(k as i32);
    let value = assemble_modified_energy(
        energy, &h_terms, &vp_terms, params.c_l, params.c3, params.c4, &params.cbar, tau_k,
    );
    Ok(ModifiedEnergy { energy, h_terms, vp_terms, value })
}

/// Time integrals of `||du/dt||_H^2` and `||du/dt||_{V^p}^2` over one interval,
/// with `u` rebuilt per mode from the exact solution of the interval's ODE.
fn interval_norms(state: &StepperState, rec: &IntervalRecord, quad_points: usize) -> (f64, f64) {
    let k = state.order();
    let tau = rec.tau;
    let k_sym = state.k_symbol();
    let precond = state.preconditioner();
    let stab = state.stabilization_symbol();
    let xi_hat = state.table().xi_hat();
    let area = state.grid().area();
    let (nodes, weights) = gauss_legendre_on(quad_points, 0.0, tau);

    let mut phis = vec![0.0; k];
    let mut w_theta = vec![0.0; k];
    let mut h_int = 0.0;
    let mut v_int = 0.0;
    for (&theta, &wq) in nodes.iter().zip(&weights) {
        let ell = state.table().eval_all(theta / tau);
        let mut h_sum = 0.0;
        let mut v_sum = 0.0;
        for m in 0..k_sym.len() {
            let z = k_sym[m];
            phi_into(z, theta, &mut phis).expect("K is non-negative");
            let scale = precond.map_or(1.0, |p| p[m]);
            let mut tp = 1.0;
            for ph in phis.iter_mut() {
                *ph /= tp;
                tp *= tau;
            }
            for (i, row) in xi_hat.iter().enumerate() {
                w_theta[i] = scale * row.iter().zip(&phis).map(|(x, ph)| x * ph).sum::<f64>();
            }
            let mut u = rec.u_start[m] * (-z * theta).exp();
            let mut forcing = Complex64::new(0.0, 0.0);
            for (i, n) in rec.nonlinear.iter().enumerate() {
                u += n[m] * w_theta[i];
                forcing += n[m] * ell[i];
            }
            let du = forcing * scale - u * z;
            let s = du.norm_sqr();
            h_sum += s;
            v_sum += stab[m] * s;
        }
        h_int += wq * area * h_sum;
        v_int += wq * area * v_sum;
    }
    (h_int, v_int)
}
