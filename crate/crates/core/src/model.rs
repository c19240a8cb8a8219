//! Model parameters for G(n,p) and the exact mean and variance of the
//! isolated-vertex count.

use serde::Serialize;

use crate::error::{Error, Result};

/// Validated parameters of the Erdős–Rényi model: `n ≥ 2` vertices, each of
/// the `n(n-1)/2` possible edges present independently with probability
/// `p ∈ (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    n: usize,
    p: f64,
}

impl Params {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        validate_params(n, p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Number of vertex pairs, `n(n-1)/2`.
    pub fn pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// `n·p`.
    pub fn np(&self) -> f64 {
        self.n as f64 * self.p
    }

    pub fn moments(&self) -> Moments {
        moments(self)
    }
}

pub fn validate_params(n: usize, p: f64) -> Result<Params> {
    if n < 2 {
        return Err(Error::Param(format!("n must be ≥ 2 (got {n})")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Param(format!("p must lie in open (0,1) (got {p})")));
    }
    Ok(Params { n, p })
}

/// Exact mean and variance of the number of isolated vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mu: f64,
    pub sigma2: f64,
    pub sigma: f64,
    pub log_mu: f64,
    pub log_sigma2: f64,
}

/// `μ = n(1-p)^{n-1}` and `σ² = μ(1 + (np-1)(1-p)^{n-2})`.
///
/// Logs are always formed from `(n-1)·ln(1-p)`. The linear values use the
/// direct power while it stays in the normal range, so small cases come out
/// exact (`n=3, p=1/2` gives `0.75` and `0.9375`), and fall back to the
/// exponentiated logs otherwise.
pub fn moments(params: &Params) -> Moments {
    let n = params.n as f64;
    let p = params.p;
    let np = n * p;
    let ln_q = (-p).ln_1p();

    let log_q_n1 = (n - 1.0) * ln_q;
    let log_q_n2 = (n - 2.0) * ln_q;
    let log_mu = n.ln() + log_q_n1;

    let q_n2 = pow_or_exp(1.0 - p, params.n - 2, log_q_n2);
    let correction = 1.0 + (np - 1.0) * q_n2;
    let log_sigma2 = log_mu + correction.ln();

    let q_n1 = pow_or_exp(1.0 - p, params.n - 1, log_q_n1);
    let direct_mu = n * q_n1;
    let mu = if direct_mu.is_normal() {
        direct_mu
    } else {
        log_mu.exp()
    };
    let sigma2 = mu * correction;

    Moments {
        mu,
        sigma2,
        sigma: sigma2.sqrt(),
        log_mu,
        log_sigma2,
    }
}

fn pow_or_exp(base: f64, exp: usize, log_value: f64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => {
            let v = base.powi(e);
            if v.is_normal() || e == 0 {
                v
            } else {
                log_value.exp()
            }
        }
        Err(_) => log_value.exp(),
    }
}
