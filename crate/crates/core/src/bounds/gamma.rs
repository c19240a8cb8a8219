use serde::Serialize;

use crate::model::Params;
use crate::numeric::{ln_bernoulli_mgf, log_add_exp};

/// `ln γ_s` for `γ_s = e^s (pe^s + 1 - p)^{n-2} (npe^s + 1 - p) + (n-1)p + 1`.
///
/// The two additive parts are combined with log-sum-exp, so the result is
/// finite for any `s` a minimizer can reach.
pub fn gamma_log(params: &Params, s: f64) -> f64 {
    let n = params.n() as f64;
    let p = params.p();
    let tilted = s
        + (n - 2.0) * ln_bernoulli_mgf(p, s)
        + log_add_exp((-p).ln_1p(), params.np().ln() + s);
    log_add_exp(tilted, ((n - 1.0) * p).ln_1p())
}

/// Moment generating quantities of a vertex degree, `d(v) ~ Binomial(n-1, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeMgf {
    /// `ln α_θ`, `α_θ = E e^{θ d(v)} = (pe^θ + 1 - p)^{n-1}`.
    pub log_alpha: f64,
    /// `ln φ_θ`, `φ_θ = E[d(v) e^{θ d(v)}] = (n-1)pe^θ (pe^θ + 1 - p)^{n-2}`.
    pub log_phi: f64,
}

impl DegreeMgf {
    pub fn at(params: &Params, theta: f64) -> Self {
        let n = params.n() as f64;
        let base = ln_bernoulli_mgf(params.p(), theta);
        Self {
            log_alpha: (n - 1.0) * base,
            log_phi: (n - 1.0).ln() + params.p().ln() + theta + (n - 2.0) * base,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn phi(&self) -> f64 {
        self.log_phi.exp()
    }
}

/// `ln γ_θ` through the degree-MGF form `γ_θ = e^θ(φ_θ + α_θ) + (n-1)p + 1`.
pub fn gamma_log_via_degree_mgf(params: &Params, theta: f64) -> f64 {
    let d = DegreeMgf::at(params, theta);
    let n = params.n() as f64;
    log_add_exp(
        theta + log_add_exp(d.log_phi, d.log_alpha),
        ((n - 1.0) * params.p()).ln_1p(),
    )
}
