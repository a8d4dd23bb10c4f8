//! Diagonal coefficients of the fourth-order exponential Runge–Kutta scheme
//! (four stages with the half-step exponential, phi-function form) for
//! `du/dt = -c u + N(u, t)`, `c = nu |k|^4`, without stabilization.

use super::phi::phi_into;

/// Per-mode coefficient tables for one step size.
#[derive(Clone, Debug)]
pub struct Etdrk4Coefficients {
    pub tau: f64,
    /// `e^{-c tau / 2}`
    pub e_half: Vec<f64>,
    /// `e^{-c tau}`
    pub e_full: Vec<f64>,
    /// `(1 - e^{-c tau / 2}) / c`, limit `tau / 2`.
    pub q_half: Vec<f64>,
    /// `[-4 + c tau + e^{-c tau}(4 + 3 c tau + (c tau)^2)] / (tau^2 (-c)^3)`;
    /// weight of `N(u)`.
    pub f1: Vec<f64>,
    /// `[2 - c tau - e^{-c tau}(2 + c tau)] / (tau^2 (-c)^3)`; the update adds
    /// `2 f2 (N(a) + N(b))`.
    pub f2: Vec<f64>,
    /// `[-4 + 3 c tau - (c tau)^2 + e^{-c tau}(4 + c tau)] / (tau^2 (-c)^3)`;
    /// weight of `N(c)`. All three tend to `tau / 6` as `c -> 0`.
    pub f3: Vec<f64>,
}

impl Etdrk4Coefficients {
    /// `decay` holds `c >= 0` per mode.
    pub fn new(decay: &[f64], tau: f64) -> Self {
        let n = decay.len();
        let mut out = Self {
            tau,
            e_half: Vec::with_capacity(n),
            e_full: Vec::with_capacity(n),
            q_half: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        let mut half = [0.0; 1];
        let mut full = [0.0; 3];
        for &c in decay {
            phi_into(c, 0.5 * tau, &mut half).expect("decay rates are non-negative");
            phi_into(c, tau, &mut full).expect("decay rates are non-negative");
            // Standard phi-functions of -c tau: phi_{m+1} = full[m] / (tau^{m+1} m!).
            let p1 = full[0] / tau;
            let p2 = full[1] / (tau * tau);
            let p3 = full[2] / (2.0 * tau * tau * tau);
            out.e_half.push((-0.5 * c * tau).exp());
            out.e_full.push((-c * tau).exp());
            out.q_half.push(half[0]);
            out.f1.push(tau * (p1 - 3.0 * p2 + 4.0 * p3));
            out.f2.push(tau * (p2 - 2.0 * p3));
            out.f3.push(tau * (-p2 + 4.0 * p3));
        }
        out
    }
}
