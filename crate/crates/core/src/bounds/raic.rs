//! A nonuniform large-deviation comparator for the right tail:
//!
//! `P(W ≥ t) ≤ (1 - Φ(t)) · e^{t³β(t)/6} · (1 + Q(t)β(t))` for `t ≥ 0`, with
//! `Q(t) = 12/√(2π) + (23/2)t + (11√(2π)/2)t²` and
//! `β(t) = n/(6σ³) · (13 + 43np + 27(np)²) · exp{(8 + 4np)t/σ + 2np(e^{t/σ} - 1)}`.

use serde::Serialize;

use crate::model::{Moments, Params};
use crate::numeric::log_add_exp;

use super::normal::log_normal_sf;
use super::{BoundPoint, Method};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaicTerms {
    pub q: f64,
    pub beta: f64,
    pub log_beta: f64,
}

pub fn raic_terms(params: &Params, moments: &Moments, t: f64) -> RaicTerms {
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    let q = 12.0 / sqrt_2pi + 11.5 * t + 5.5 * sqrt_2pi * t * t;
    let np = params.np();
    let sigma = moments.sigma;
    let log_beta = (params.n() as f64).ln() - 6f64.ln() - 1.5 * moments.log_sigma2
        + (13.0 + 43.0 * np + 27.0 * np * np).ln()
        + (8.0 + 4.0 * np) * t / sigma
        + 2.0 * np * (t / sigma).exp_m1();
    RaicTerms {
        q,
        beta: log_beta.exp(),
        log_beta,
    }
}

pub fn raic_bound(params: &Params, moments: &Moments, t: f64) -> (BoundPoint, RaicTerms) {
    let t = t.max(0.0);
    let terms = raic_terms(params, moments, t);
    let cubic = if t == 0.0 {
        0.0
    } else {
        (3.0 * t.ln() + terms.log_beta - 6f64.ln()).exp()
    };
    let log_bound = log_normal_sf(t) + cubic + log_add_exp(0.0, terms.q.ln() + terms.log_beta);
    (BoundPoint::new(t, log_bound, None, Method::Raic), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::normal_sf;

    #[test]
    fn value_at_zero() {
        let pr = Params::new(1000, 0.001).unwrap();
        let m = pr.moments();
        let (b, terms) = raic_bound(&pr, &m, 0.0);
        // Q(0) = 12/√(2π)
        assert!((terms.q - 4.787_307_364_817_194).abs() < 1e-12);
        let want = 0.5 * (1.0 + terms.q * terms.beta);
        assert!((b.log_bound.exp() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn never_below_the_normal_tail() {
        for &(n, p) in &[(10, 0.3), (1000, 0.001), (300, 0.01)] {
            let pr = Params::new(n, p).unwrap();
            let m = pr.moments();
            for i in 0..50 {
                let t = 0.2 * i as f64;
                let (b, terms) = raic_bound(&pr, &m, t);
                assert!(terms.q > 0.0 && terms.beta > 0.0);
                assert!(b.log_bound >= normal_sf(t).ln());
            }
        }
    }
}
