//! Step-size independent constants of the stability analysis and the
//! stabilization parameters derived from them.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::lagrange::{rational_to_f64, LagrangeTable};
use crate::error::{Error, Result};

/// Exact `C*_j^2 = int_0^1 (1 - sum_{i<j} l_i(sigma))^2 d sigma`, `j = 0..k`.
/// The `j = 0` entry is 1 (empty sum).
pub fn cstar_squared_exact(table: &LagrangeTable) -> Vec<BigRational> {
    let k = table.order();
    let exact = table.exact();
    (0..k)
        .map(|j| {
            // 1 - sum_{i<j} l_i as a polynomial in sigma.
            let mut poly = vec![BigRational::zero(); k];
            poly[0] = BigRational::one();
            for row in exact.iter().take(j) {
                for (p, c) in poly.iter_mut().zip(row) {
                    *p -= c;
                }
            }
            // int_0^1 poly^2 = sum_{a,b} c_a c_b / (a + b + 1)
            let mut acc = BigRational::zero();
            for (a, ca) in poly.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in poly.iter().enumerate() {
                    let denom = BigRational::from_integer(((a + b + 1) as i64).into());
                    acc += ca * cb / denom;
                }
            }
            acc
        })
        .collect()
}

/// `C*_j`, `j = 0..k`, with `C*_0 = 1`.
pub fn cstar_constants(table: &LagrangeTable) -> Vec<f64> {
    cstar_squared_exact(table)
        .iter()
        .map(|r| rational_to_f64(r).sqrt())
        .collect()
}

/// Tail sums `Cbar_j = sum_{i >= j} C*_i`, so `Cbar_j = Cbar_{j+1} + C*_j`.
pub fn cbar_constants(cstar: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cstar.len()];
    let mut acc = 0.0;
    for j in (0..cstar.len()).rev() {
        acc += cstar[j];
        out[j] = acc;
    }
    out
}

/// Lipschitz indices of the nonlinearity:
/// `||N(u) - N(v)||_{V^-beta} <= c_l ||u - v||_{V^gamma}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzIndices {
    pub beta: f64,
    pub gamma: f64,
    pub c_l: f64,
}

#[derive(Clone, Debug)]
pub struct StabilizationParams {
    pub k: usize,
    pub beta: f64,
    pub gamma: f64,
    pub c_l: f64,
    /// Stabilization exponent `(beta + gamma) k / 2`.
    pub p: f64,
    /// Interpolation split `1 / (1 + gamma / beta)`.
    pub q: f64,
    pub c_hat: f64,
    pub c_tilde: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub cstar: Vec<f64>,
    pub cbar: Vec<f64>,
    /// Smallest stabilization coefficient meeting `A >= c_l (c2 + c4) cbar_0`.
    /// For `k = 4`, `beta = gamma = 1/2` this is `27 (1 + Cbar_1)^4 / 256`.
    pub a: f64,
}

/// `27 (1 + Cbar_1)^4 / 512` with `Cbar_1 = (sqrt 18286 + sqrt 157441 + sqrt 1696) / sqrt 7560`,
/// about 175.23: the coefficient behind the reference fourth-order NSS
/// convergence tables. Its `C*_2^2 = 157441/7560` differs from the exact
/// `16003/7560`, so this is not what [`StabilizationParams`] derives.
pub fn reference_order_four_a() -> f64 {
    let cbar1 = (18286f64.sqrt() + 157441f64.sqrt() + 1696f64.sqrt()) / 7560f64.sqrt();
    27.0 * (1.0 + cbar1).powi(4) / 512.0
}

impl StabilizationParams {
    pub fn new(k: usize, lip: LipschitzIndices) -> Result<Self> {
        let LipschitzIndices { beta, gamma, c_l } = lip;
        for (name, v) in [("beta", beta), ("gamma", gamma), ("C_L", c_l)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let table = LagrangeTable::new(k)?;
        let cstar = cstar_constants(&table);
        let cbar = cbar_constants(&cstar);
        let cbar0 = cbar[0];

        let p = (beta + gamma) * k as f64 / 2.0;
        let q = 1.0 / (1.0 + gamma / beta);
        let theta_b = beta / p;
        let theta_g = gamma / p;
        if theta_b > 1.0 + 1e-12 || theta_g > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "p = {p} must be at least max(beta, gamma) = {}",
                beta.max(gamma)
            )));
        }

        let target = 2.0 / (c_l * cbar0);
        let c = solve_equal_split(theta_b, theta_g, target);
        let (c1, c2) = young_constants(theta_b, c);
        let (c3, c4) = young_constants(theta_g, c);
        let a = c_l * (c2 + c4) * cbar0;

        let params = Self {
            k,
            beta,
            gamma,
            c_l,
            p,
            q,
            c_hat: c,
            c_tilde: c,
            c1,
            c2,
            c3,
            c4,
            cstar,
            cbar,
            a,
        };
        if params.energy_slack() < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "constraint 1 >= C_L (C1 + C3) Cbar_0 violated by {}",
                -params.energy_slack()
            )));
        }
        Ok(params)
    }

    /// `1 - C_L (C1 + C3) Cbar_0`; non-negative when the H-part constraint holds.
    pub fn energy_slack(&self) -> f64 {
        1.0 - self.c_l * (self.c1 + self.c3) * self.cbar[0]
    }

    /// `A - C_L (C2 + C4) Cbar_0` for a given stabilization coefficient.
    pub fn stabilization_slack(&self, a: f64) -> f64 {
        a - self.c_l * (self.c2 + self.c4) * self.cbar[0]
    }
}

/// `(C1, C2)` of the interpolation/Young estimate for exponent ratio `theta = beta / p`.
/// At `theta = 1` no interpolation is needed: `C1 = 0`, `C2 = 1/2`.
fn young_constants(theta: f64, c: f64) -> (f64, f64) {
    if (1.0 - theta).abs() <= 1e-12 {
        return (0.0, 0.5);
    }
    let c1 = 0.5 * (1.0 - theta) * c.powf(1.0 / (1.0 - theta));
    let c2 = 0.5 * theta * c.powf(-1.0 / theta);
    (c1, c2)
}

/// Solves `(1 - tb) c^(1/(1-tb)) + (1 - tg) c^(1/(1-tg)) = target` for `c > 0`.
fn solve_equal_split(tb: f64, tg: f64, target: f64) -> f64 {
    let degenerate = |t: f64| (1.0 - t).abs() <= 1e-12;
    let term = |t: f64, c: f64| if degenerate(t) { 0.0 } else { (1.0 - t) * c.powf(1.0 / (1.0 - t)) };
    match (degenerate(tb), degenerate(tg)) {
        (true, true) => return 1.0,
        (false, true) => return (target / (1.0 - tb)).powf(1.0 - tb),
        (true, false) => return (target / (1.0 - tg)).powf(1.0 - tg),
        _ => {}
    }
    if (tb - tg).abs() <= 1e-15 {
        return (target / (2.0 * (1.0 - tb))).powf(1.0 - tb);
    }
    // Monotone increasing in c; bisect on log c.
    let f = |lc: f64| term(tb, lc.exp()) + term(tg, lc.exp()) - target;
    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}
