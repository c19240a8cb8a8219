//! Finite-grid version of the sub-Gaussian right-tail constant for the
//! regime `np → c`.
//!
//! Since `Y ≤ n`, `W ≤ n/σ ≤ a₀√n`, so the right tail vanishes beyond
//! `a₀√n`. Taking `θ_n = a₀√n σ²/μ` in the piecewise bound and using
//! `γ_s ≥ 2`, the quadratic branch covers every `t ≤ a₀√n`, giving
//! `P(W ≥ t) ≤ exp(-k t²)` for any `k ≤ σ²/(μ γ_{θ_n/σ})`.
//!
//! The true constant is an infimum over all `n`; here `a₀` is the maximum
//! of `√n/σ` and `k` the minimum of the ratio over the supplied grid only.
//! A grid that misses the extremal `n` can overstate `k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Params;

use super::gamma::gamma_log;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub n: usize,
    pub p: f64,
    pub mu: f64,
    pub sigma2: f64,
    pub theta_n: f64,
    /// `ln γ_{θ_n/σ}`
    pub log_gamma: f64,
    /// `σ² / (μ γ_{θ_n/σ})`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryResult {
    pub c: f64,
    pub n_grid: Vec<usize>,
    pub a0: f64,
    pub k: f64,
    pub rows: Vec<CorollaryRow>,
}

impl CorollaryResult {
    /// `ln exp(-k t²)`.
    pub fn log_bound(&self, t: f64) -> f64 {
        -self.k * t * t
    }
}

pub fn corollary_k(c: f64, n_grid: &[usize]) -> Result<CorollaryResult> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Param(format!("c must be > 0 (got {c})")));
    }
    if n_grid.is_empty() {
        return Err(Error::Param("n-grid must not be empty".into()));
    }
    let params = n_grid
        .iter()
        .map(|&n| {
            let p = c / n as f64;
            if p >= 1.0 {
                return Err(Error::Param(format!("c/n = {p} is not below 1 at n = {n}")));
            }
            Params::new(n, p)
        })
        .collect::<Result<Vec<_>>>()?;

    let a0 = params
        .iter()
        .map(|pr| (pr.n() as f64).sqrt() / pr.moments().sigma)
        .fold(f64::NEG_INFINITY, f64::max);

    let rows: Vec<CorollaryRow> = params
        .iter()
        .map(|pr| {
            let m = pr.moments();
            let theta_n = a0 * (pr.n() as f64).sqrt() * m.sigma2 / m.mu;
            let log_gamma = gamma_log(pr, theta_n / m.sigma);
            CorollaryRow {
                n: pr.n(),
                p: pr.p(),
                mu: m.mu,
                sigma2: m.sigma2,
                theta_n,
                log_gamma,
                ratio: (m.log_sigma2 - m.log_mu - log_gamma).exp(),
            }
        })
        .collect();
    let k = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(CorollaryResult {
        c,
        n_grid: n_grid.to_vec(),
        a0,
        k,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{chernoff_right, piecewise_right};

    #[test]
    fn positive_k_for_unit_c() {
        let r = corollary_k(1.0, &[10, 100, 1000, 10_000]).unwrap();
        assert!(r.k > 0.0);
        for row in &r.rows {
            assert!(r.k <= row.ratio);
            // γ ≥ 2 puts the threshold of the quadratic branch past a₀√n
            let t_star = row.theta_n * row.mu * row.log_gamma.exp() / (2.0 * row.sigma2);
            assert!(t_star >= r.a0 * (row.n as f64).sqrt() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn unit_c_makes_variance_equal_mean() {
        let r = corollary_k(1.0, &[10]).unwrap();
        let row = r.rows[0];
        assert!((row.sigma2 - row.mu).abs() < 1e-14 * row.mu);
    }

    #[test]
    fn dominates_chernoff_on_grid_points() {
        let r = corollary_k(1.0, &[10, 100, 1000]).unwrap();
        for row in &r.rows {
            let pr = Params::new(row.n, row.p).unwrap();
            let m = pr.moments();
            let t_max = r.a0 * (row.n as f64).sqrt();
            for i in 1..=20 {
                let t = t_max * i as f64 / 20.0;
                let chern = chernoff_right(&pr, &m, t).log_bound;
                let pw = piecewise_right(&pr, &m, t, row.theta_n).unwrap().log_bound;
                assert!(chern <= pw + 1e-9 * pw.abs());
                assert!(pw <= r.log_bound(t) + 1e-9 * pw.abs(), "n={} t={t}", row.n);
            }
        }
    }

    #[test]
    fn errors() {
        assert!(corollary_k(0.0, &[10]).is_err());
        assert!(corollary_k(1.0, &[]).is_err());
        assert!(corollary_k(5.0, &[4]).is_err());
        assert!(corollary_k(1.0, &[1]).is_err());
    }
}
