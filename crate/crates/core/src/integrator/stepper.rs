use std::collections::VecDeque;
use std::sync::Arc;

use log::warn;
use rustfft::num_complex::Complex64;

use super::constants::StabilizationParams;
use super::etdrk4::Etdrk4Coefficients;
use super::lagrange::LagrangeTable;
use super::phi::phi_into;
use crate::error::{Error, Result};
use crate::models::GradientFlowModel;
use crate::spectral::{Field, SpectralGrid, Spectrum};

/// A stabilization parameter: derived from the model's Lipschitz data, or given.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamChoice {
    Auto,
    Fixed(f64),
}

/// How the extrapolated nonlinearity enters the update.
///
/// `Differential` integrates the stabilized equation
/// `(1 + A tau^k L^p) du/dt + nu L u = sum_i l_i N(u^{n-i})` exactly over the
/// step, so every weight carries the factor `(1 + A tau^k L^p)^{-1}`.
/// `Integrated` drops that factor:
/// `u^{n+1} = e^{-K tau} u^n + sum_i sum_j xi_{i,j} phi_j N(u^{n-i})`. Both are
/// `k`-th order, but without the factor the explicit term is no longer damped
/// at high wavenumbers once `A > 0`, and NSS runs lose stability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NonlinearWeighting {
    Integrated,
    #[default]
    Differential,
}

#[derive(Clone, Debug)]
pub struct StepperConfig {
    pub order: usize,
    pub tau: f64,
    pub a: ParamChoice,
    pub p: ParamChoice,
    pub weighting: NonlinearWeighting,
    /// Keep the last `k - 1` intervals for modified-energy reconstruction.
    pub retain_intervals: bool,
}

impl StepperConfig {
    pub fn new(order: usize, tau: f64) -> Self {
        Self {
            order,
            tau,
            a: ParamChoice::Auto,
            p: ParamChoice::Auto,
            weighting: NonlinearWeighting::default(),
            retain_intervals: false,
        }
    }

    pub fn with_a(mut self, a: ParamChoice) -> Self {
        self.a = a;
        self
    }

    pub fn with_p(mut self, p: ParamChoice) -> Self {
        self.p = p;
        self
    }

    pub fn with_weighting(mut self, w: NonlinearWeighting) -> Self {
        self.weighting = w;
        self
    }

    pub fn retaining_intervals(mut self, on: bool) -> Self {
        self.retain_intervals = on;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Bootstrap,
    Multistep,
}

/// Data of one completed multistep interval: its start state and the
/// nonlinear history (newest first) that drove it.
#[derive(Clone, Debug)]
pub struct IntervalRecord {
    pub t_start: f64,
    pub tau: f64,
    pub u_start: Arc<Vec<Complex64>>,
    pub nonlinear: Vec<Arc<Vec<Complex64>>>,
}

#[derive(Clone, Debug)]
struct HistoryEntry {
    t: f64,
    n_hat: Arc<Vec<Complex64>>,
}

/// Diagonal operators for one step size.
#[derive(Clone, Debug)]
struct Operators {
    tau: f64,
    k_symbol: Vec<f64>,
    exp_op: Vec<f64>,
    /// `(1 + A tau^k L^p)^{-1}` when the differential weighting is active.
    precond: Option<Vec<f64>>,
    weights: Vec<Vec<f64>>,
    rk: Etdrk4Coefficients,
}

#[derive(Debug)]
pub struct StepperState {
    grid: Arc<SpectralGrid>,
    model: Arc<dyn GradientFlowModel>,
    table: LagrangeTable,
    params: StabilizationParams,
    a: f64,
    p: f64,
    weighting: NonlinearWeighting,
    /// `L` per mode.
    l_symbol: Vec<f64>,
    /// `L^p` per mode.
    stab_symbol: Vec<f64>,
    ops: Operators,
    history: VecDeque<HistoryEntry>,
    u_hat: Vec<Complex64>,
    t: f64,
    steps_taken: u64,
    segment_t0: f64,
    segment_steps: u64,
    retain_intervals: bool,
    intervals: VecDeque<IntervalRecord>,
}

/// Builds a stepper with state `u = 0` at `t = 0`; call
/// [`StepperState::set_initial`] before stepping.
pub fn build_stepper(
    grid: Arc<SpectralGrid>,
    model: Arc<dyn GradientFlowModel>,
    config: &StepperConfig,
) -> Result<StepperState> {
    let k = config.order;
    let table = LagrangeTable::new(k)?;
    let params = StabilizationParams::new(k, model.lipschitz())?;
    if !(config.tau > 0.0) || !config.tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {}", config.tau)));
    }
    let a = match config.a {
        ParamChoice::Auto => params.a,
        ParamChoice::Fixed(a) => {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::InvalidParameter(format!("A must be >= 0, got {a}")));
            }
            if params.stabilization_slack(a) < 0.0 {
                warn!(
                    "A = {a} is below the sufficient stability bound {:.6}",
                    params.a
                );
            }
            a
        }
    };
    let p = match config.p {
        ParamChoice::Auto => params.p,
        ParamChoice::Fixed(p) => {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!("p must be >= 0, got {p}")));
            }
            p
        }
    };
    let l_symbol = model.linear_symbol(&grid);
    if l_symbol.len() != grid.len() || l_symbol.iter().any(|&l| !(l >= 0.0)) {
        return Err(Error::InvalidParameter("linear symbol must be non-negative per mode".into()));
    }
    let stab_symbol: Vec<f64> = l_symbol.iter().map(|&l| if l == 0.0 { 0.0 } else { l.powf(p) }).collect();
    let ops = Operators::build(
        &table,
        model.nu(),
        &l_symbol,
        &stab_symbol,
        a,
        config.tau,
        config.weighting,
    );
    let n2 = grid.len();
    Ok(StepperState {
        grid,
        model,
        table,
        params,
        a,
        p,
        weighting: config.weighting,
        l_symbol,
        stab_symbol,
        ops,
        history: VecDeque::with_capacity(k),
        u_hat: vec![Complex64::new(0.0, 0.0); n2],
        t: 0.0,
        steps_taken: 0,
        segment_t0: 0.0,
        segment_steps: 0,
        retain_intervals: config.retain_intervals,
        intervals: VecDeque::with_capacity(k),
    })
}

impl Operators {
    fn build(
        table: &LagrangeTable,
        nu: f64,
        l_symbol: &[f64],
        stab_symbol: &[f64],
        a: f64,
        tau: f64,
        weighting: NonlinearWeighting,
    ) -> Self {
        let k = table.order();
        let n2 = l_symbol.len();
        let tau_k = tau.powi(k as i32);
        let denom: Vec<f64> = stab_symbol.iter().map(|s| 1.0 + a * tau_k * s).collect();
        let k_symbol: Vec<f64> = l_symbol.iter().zip(&denom).map(|(l, d)| nu * l / d).collect();
        let exp_op: Vec<f64> = k_symbol.iter().map(|z| (-z * tau).exp()).collect();
        let precond = match weighting {
            NonlinearWeighting::Integrated => None,
            NonlinearWeighting::Differential => Some(denom.iter().map(|d| 1.0 / d).collect::<Vec<_>>()),
        };

        let mut weights = vec![vec![0.0; n2]; k];
        let mut phis = vec![0.0; k];
        let xi_hat = table.xi_hat();
        for (m, &z) in k_symbol.iter().enumerate() {
            phi_into(z, tau, &mut phis).expect("K is non-negative");
            // phi_j ~ tau^{j+1} and xi_{i,j} ~ tau^{-j}; fold the powers first.
            let mut tp = 1.0;
            for ph in phis.iter_mut() {
                *ph /= tp;
                tp *= tau;
            }
            let scale = precond.as_ref().map_or(1.0, |pc| pc[m]);
            for (i, row) in xi_hat.iter().enumerate() {
                let w: f64 = row.iter().zip(&phis).map(|(x, ph)| x * ph).sum();
                weights[i][m] = scale * w;
            }
        }

        let decay: Vec<f64> = l_symbol.iter().map(|l| nu * l).collect();
        let rk = Etdrk4Coefficients::new(&decay, tau);
        Self { tau, k_symbol, exp_op, precond, weights, rk }
    }
}

impl StepperState {
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn model(&self) -> &Arc<dyn GradientFlowModel> {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn table(&self) -> &LagrangeTable {
        &self.table
    }

    pub fn params(&self) -> &StabilizationParams {
        &self.params
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weighting(&self) -> NonlinearWeighting {
        self.weighting
    }

    pub fn tau(&self) -> f64 {
        self.ops.tau
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    /// `L` per mode.
    pub fn linear_symbol(&self) -> &[f64] {
        &self.l_symbol
    }

    /// `L^p` per mode.
    pub fn stabilization_symbol(&self) -> &[f64] {
        &self.stab_symbol
    }

    /// `K = nu L / (1 + A tau^k L^p)` per mode.
    pub fn k_symbol(&self) -> &[f64] {
        &self.ops.k_symbol
    }

    /// `e^{-K tau}` per mode.
    pub fn exp_op(&self) -> &[f64] {
        &self.ops.exp_op
    }

    /// `(1 + A tau^k L^p)^{-1}` per mode, present for the differential weighting.
    pub fn preconditioner(&self) -> Option<&[f64]> {
        self.ops.precond.as_deref()
    }

    /// Combined weights `w_i` per mode, `i = 0..k`.
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.ops.weights
    }

    pub fn etdrk4_coefficients(&self) -> &Etdrk4Coefficients {
        &self.ops.rk
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.u_hat
    }

    pub fn field(&self) -> Field {
        Spectrum::new(self.grid.clone(), self.u_hat.clone())
            .expect("state spectrum matches grid")
            .to_field()
    }

    /// Time stamps of the stored nonlinear history, newest first.
    pub fn history_times(&self) -> Vec<f64> {
        self.history.iter().map(|h| h.t).collect()
    }

    pub fn history_ready(&self) -> bool {
        self.history.len() == self.order()
    }

    /// Completed multistep intervals, newest first (empty unless retention is on).
    pub fn intervals(&self) -> &VecDeque<IntervalRecord> {
        &self.intervals
    }

    pub fn retains_intervals(&self) -> bool {
        self.retain_intervals
    }

    fn eval_nonlinear(&self, u_hat: &[Complex64], t: f64) -> Vec<Complex64> {
        let mut n = self.model.nonlinear_spectral(&self.grid, u_hat, t);
        if self.model.conserves_mean() {
            n[0] = Complex64::new(0.0, 0.0);
        }
        n
    }

    /// Resets the state to `u0` at `t0` and seeds the history with `N(u0, t0)`.
    pub fn set_initial(&mut self, u0: &Field, t0: f64) -> Result<()> {
        if u0.grid().n() != self.grid.n() || u0.grid().length() != self.grid.length() {
            return Err(Error::GridMismatch);
        }
        self.u_hat = self.grid.forward(u0.values())?;
        self.t = t0;
        self.steps_taken = 0;
        self.reset_segment();
        Ok(())
    }

    fn reset_segment(&mut self) {
        self.segment_t0 = self.t;
        self.segment_steps = 0;
        self.history.clear();
        self.intervals.clear();
        let n = self.eval_nonlinear(&self.u_hat, self.t);
        self.history.push_front(HistoryEntry { t: self.t, n_hat: Arc::new(n) });
    }

    /// Switches to step size `tau`. A different `tau` rebuilds the operators
    /// and restarts the history from the current state; an equal one is a no-op.
    pub fn set_tau(&mut self, tau: f64) -> Result<()> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        if tau == self.ops.tau {
            return Ok(());
        }
        self.ops = Operators::build(
            &self.table,
            self.model.nu(),
            &self.l_symbol,
            &self.stab_symbol,
            self.a,
            tau,
            self.weighting,
        );
        self.reset_segment();
        Ok(())
    }

    /// One step: ETD-RK4 while the history is incomplete, ETD-MS afterwards.
    pub fn step(&mut self) -> Result<StepKind> {
        if self.history_ready() {
            self.etdms_step()?;
            Ok(StepKind::Multistep)
        } else {
            self.bootstrap_step()?;
            Ok(StepKind::Bootstrap)
        }
    }

    /// Fills the history with `k - 1` ETD-RK4 steps.
    pub fn bootstrap(&mut self) -> Result<()> {
        while !self.history_ready() {
            self.bootstrap_step()?;
        }
        Ok(())
    }

    fn next_time(&self) -> f64 {
        self.segment_t0 + (self.segment_steps + 1) as f64 * self.ops.tau
    }

    fn commit(&mut self, u_new: Vec<Complex64>, t_new: f64) -> Result<()> {
        if u_new.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::BlowUp { t: t_new, steps: self.steps_taken + 1 });
        }
        let n = self.eval_nonlinear(&u_new, t_new);
        self.u_hat = u_new;
        self.t = t_new;
        self.steps_taken += 1;
        self.segment_steps += 1;
        self.history.push_front(HistoryEntry { t: t_new, n_hat: Arc::new(n) });
        self.history.truncate(self.order());
        Ok(())
    }

    fn bootstrap_step(&mut self) -> Result<()> {
        let t_new = self.next_time();
        let n_u = self.history.front().map(|h| h.n_hat.clone());
        let u_new = self.etdrk4_spectral(&self.u_hat, self.t, n_u.as_deref().map(|v| v.as_slice()));
        self.intervals.clear();
        self.commit(u_new, t_new)
    }

    /// One ETD-RK4 step of `du/dt = -nu L u + N(u, t)` from `(u, t)`.
    pub fn etdrk4_step(&self, u: &Field, t: f64) -> Result<Field> {
        if u.grid().n() != self.grid.n() {
            return Err(Error::GridMismatch);
        }
        let u_hat = self.grid.forward(u.values())?;
        let out = self.etdrk4_spectral(&u_hat, t, None);
        if out.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::BlowUp { t: t + self.ops.tau, steps: self.steps_taken });
        }
        Ok(Spectrum::new(self.grid.clone(), out)?.to_field())
    }

    fn etdrk4_spectral(&self, u: &[Complex64], t: f64, n_u: Option<&[Complex64]>) -> Vec<Complex64> {
        let rk = &self.ops.rk;
        let tau = rk.tau;
        let n2 = u.len();
        let nu_owned;
        let n_u = match n_u {
            Some(v) => v,
            None => {
                nu_owned = self.eval_nonlinear(u, t);
                &nu_owned
            }
        };
        let a: Vec<Complex64> = (0..n2).map(|m| rk.e_half[m] * u[m] + rk.q_half[m] * n_u[m]).collect();
        let n_a = self.eval_nonlinear(&a, t + 0.5 * tau);
        let b: Vec<Complex64> = (0..n2).map(|m| rk.e_half[m] * u[m] + rk.q_half[m] * n_a[m]).collect();
        let n_b = self.eval_nonlinear(&b, t + 0.5 * tau);
        let c: Vec<Complex64> = (0..n2)
            .map(|m| rk.e_half[m] * a[m] + rk.q_half[m] * (2.0 * n_b[m] - n_u[m]))
            .collect();
        let n_c = self.eval_nonlinear(&c, t + tau);
        (0..n2)
            .map(|m| {
                rk.e_full[m] * u[m]
                    + rk.f1[m] * n_u[m]
                    + 2.0 * rk.f2[m] * (n_a[m] + n_b[m])
                    + rk.f3[m] * n_c[m]
            })
            .collect()
    }

    /// One multistep step `u^{n+1} = e^{-K tau} u^n + sum_i w_i N(u^{n-i})`.
    pub fn etdms_step(&mut self) -> Result<()> {
        let k = self.order();
        if !self.history_ready() {
            return Err(Error::IncompleteHistory { have: self.history.len(), need: k });
        }
        let tau = self.ops.tau;
        for (i, h) in self.history.iter().enumerate() {
            let expect = self.t - i as f64 * tau;
            if (h.t - expect).abs() > 1e-6 * tau {
                return Err(Error::InvalidParameter(format!(
                    "history entry {i} at t = {} is not spaced by tau = {tau}",
                    h.t
                )));
            }
        }
        if self.retain_intervals {
            self.intervals.push_front(IntervalRecord {
                t_start: self.t,
                tau,
                u_start: Arc::new(self.u_hat.clone()),
                nonlinear: self.history.iter().map(|h| h.n_hat.clone()).collect(),
            });
            self.intervals.truncate(k.saturating_sub(1));
        }
        let ops = &self.ops;
        let mut u_new: Vec<Complex64> = self
            .u_hat
            .iter()
            .zip(&ops.exp_op)
            .map(|(u, e)| u * *e)
            .collect();
        for (w, h) in ops.weights.iter().zip(&self.history) {
            for ((un, wm), nm) in u_new.iter_mut().zip(w).zip(h.n_hat.iter()) {
                *un += nm * *wm;
            }
        }
        let t_new = self.next_time();
        self.commit(u_new, t_new)
    }

    /// Advances `n` steps.
    pub fn advance(&mut self, n: u64) -> Result<()> {
        for _ in 0..n {
            self.step()?;
        }
        Ok(())
    }
}
