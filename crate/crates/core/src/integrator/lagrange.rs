//! Shifted Lagrange basis through the nodes `0, -1, ..., -(k-1)` in the
//! normalized time `sigma = s / tau`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 8;

/// Coefficients of `l_i(sigma) = sum_j xi_hat[i][j] sigma^j`.
///
/// In physical time `l_i(s) = sum_j xi[i][j] s^j` with
/// `xi[i][j] = xi_hat[i][j] * tau^(-j)`.
#[derive(Clone, Debug)]
pub struct LagrangeTable {
    k: usize,
    exact: Vec<Vec<BigRational>>,
    xi_hat: Vec<Vec<f64>>,
}

impl LagrangeTable {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ORDER {
            return Err(Error::OrderOutOfRange(k));
        }
        let exact: Vec<Vec<BigRational>> = (0..k).map(|i| basis_polynomial(i, k)).collect();
        let xi_hat = exact
            .iter()
            .map(|row| row.iter().map(rational_to_f64).collect())
            .collect();
        Ok(Self { k, exact, xi_hat })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn xi_hat(&self) -> &[Vec<f64>] {
        &self.xi_hat
    }

    /// Exact rational coefficients, `exact()[i][j]` multiplying `sigma^j`.
    pub fn exact(&self) -> &[Vec<BigRational>] {
        &self.exact
    }

    /// `xi_{i,j}` for step size `tau`.
    pub fn xi(&self, i: usize, j: usize, tau: f64) -> f64 {
        self.xi_hat[i][j] / tau.powi(j as i32)
    }

    /// Evaluates `l_i` at normalized time `sigma` (Horner).
    pub fn eval(&self, i: usize, sigma: f64) -> f64 {
        self.xi_hat[i].iter().rev().fold(0.0, |acc, c| acc * sigma + c)
    }

    /// Evaluates `l_i` at a rational `sigma` without rounding.
    pub fn eval_exact(&self, i: usize, sigma: &BigRational) -> BigRational {
        self.exact[i]
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * sigma + c)
    }

    /// All `l_i(sigma)`, `i = 0..k`.
    pub fn eval_all(&self, sigma: f64) -> Vec<f64> {
        (0..self.k).map(|i| self.eval(i, sigma)).collect()
    }
}

/// `l_i(sigma) = prod_{m != i} (m + sigma) / (m - i)` expanded in powers of sigma.
fn basis_polynomial(i: usize, k: usize) -> Vec<BigRational> {
    let mut poly = vec![BigRational::one()];
    for m in (0..k).filter(|&m| m != i) {
        let denom = BigRational::from_integer(BigInt::from(m as i64 - i as i64));
        let shift = BigRational::from_integer(BigInt::from(m as i64));
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (d, c) in poly.iter().enumerate() {
            next[d] += c * &shift;
            next[d + 1] += c.clone();
        }
        poly = next.into_iter().map(|c| c / &denom).collect();
    }
    poly.resize(k, BigRational::zero());
    poly
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational fits in f64")
}
