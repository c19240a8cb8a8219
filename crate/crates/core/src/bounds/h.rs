use crate::error::Result;
use crate::model::{Moments, Params};
use crate::numeric::ln_bernoulli_mgf;

use super::gamma::gamma_log;
use super::quadrature::adaptive_simpson;

pub const QUADRATURE_REL_TOL: f64 = 1e-10;
pub const QUADRATURE_MAX_DEPTH: usize = 60;

/// `ln H'(θ)` with `H'(θ) = (μ / 2σ²) θ γ_{θ/σ}`; `-∞` at `θ = 0`.
pub fn log_h_prime(params: &Params, moments: &Moments, theta: f64) -> f64 {
    if theta <= 0.0 {
        return f64::NEG_INFINITY;
    }
    moments.log_mu - std::f64::consts::LN_2 - moments.log_sigma2
        + theta.ln()
        + gamma_log(params, theta / moments.sigma)
}

/// Closed form of `H(θ) = (μ/2σ²) ∫_0^θ s γ_{s/σ} ds`.
///
/// With `u = θ/σ` and `B = 1 + p(e^u - 1)` the primitive is
///
/// ```text
/// H(θ) = μ/(2σ²) · [ np((n-1)p+1)θ² + 2σ²(1 - Bⁿ) + 2npσθ e^u B^{n-1} ] / (2np)
/// ```
///
/// with `1 - Bⁿ` taken through `expm1`. The value is `+∞` once `Bⁿ`
/// overflows.
pub fn h_closed(params: &Params, moments: &Moments, theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let n = params.n() as f64;
    let p = params.p();
    let np = params.np();
    let sigma = moments.sigma;
    let u = theta / sigma;
    let ln_b = ln_bernoulli_mgf(p, u);

    let quadratic = np * ((n - 1.0) * p + 1.0) * theta * theta;
    let one_minus_bn = -(n * ln_b).exp_m1();
    let tilted = (u + (n - 1.0) * ln_b).exp();
    let numerator =
        quadratic + 2.0 * moments.sigma2 * one_minus_bn + 2.0 * np * sigma * theta * tilted;
    moments.mu / (2.0 * moments.sigma2) * numerator / (2.0 * np)
}

/// `H(θ)` by adaptive Simpson integration of `s γ_{s/σ}` over `[0, θ]`.
pub fn h_quadrature(params: &Params, moments: &Moments, theta: f64) -> Result<f64> {
    let sigma = moments.sigma;
    let integral = adaptive_simpson(
        |s| s * gamma_log(params, s / sigma).exp(),
        0.0,
        theta,
        QUADRATURE_REL_TOL,
        QUADRATURE_MAX_DEPTH,
    )?;
    Ok(moments.mu / (2.0 * moments.sigma2) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize, p: f64) -> (Params, Moments) {
        let pr = Params::new(n, p).unwrap();
        (pr, pr.moments())
    }

    #[test]
    fn vanishes_at_zero() {
        let (pr, m) = setup(3, 0.5);
        assert_eq!(h_closed(&pr, &m, 0.0), 0.0);
        assert_eq!(h_quadrature(&pr, &m, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn three_vertices_theta_one_against_midpoint_rule() {
        let (pr, m) = setup(3, 0.5);
        // Independent oracle: plain midpoint rule, 10⁶ panels, γ by the
        // integrand formula in linear space.
        let gamma = |s: f64| {
            let (n, p) = (3.0, 0.5);
            s.exp() * (p * s.exp() + 1.0 - p).powf(n - 2.0) * (n * p * s.exp() + 1.0 - p)
                + (n - 1.0) * p
                + 1.0
        };
        let panels = 1_000_000;
        let h = 1.0 / panels as f64;
        let integral: f64 = (0..panels)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                s * gamma(s / m.sigma)
            })
            .sum::<f64>()
            * h;
        let oracle = m.mu / (2.0 * m.sigma2) * integral;
        let quad = h_quadrature(&pr, &m, 1.0).unwrap();
        assert!((quad - oracle).abs() < 1e-8, "{quad} vs {oracle}");
        assert!((h_closed(&pr, &m, 1.0) - oracle).abs() < 1e-8);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for &(n, p) in &[(2, 0.5), (3, 0.1), (6, 0.9), (100, 0.02), (1000, 0.001)] {
            let (pr, m) = setup(n, p);
            for i in 1..=20 {
                let theta = 0.25 * i as f64 * m.sigma;
                let a = h_closed(&pr, &m, theta);
                let b = h_quadrature(&pr, &m, theta).unwrap();
                assert!((a - b).abs() <= 1e-8 * b.abs(), "n={n} p={p} θ={theta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn convex_by_finite_differences() {
        let (pr, m) = setup(50, 0.05);
        let step = 1e-3;
        for i in 1..200 {
            let t = i as f64 * 0.05;
            let d2 = h_closed(&pr, &m, t + step) - 2.0 * h_closed(&pr, &m, t) + h_closed(&pr, &m, t - step);
            assert!(d2 / (step * step) >= -1e-9 * (1.0 + h_closed(&pr, &m, t).abs()), "t={t}");
        }
    }

    #[test]
    fn derivative_matches_log_h_prime() {
        let (pr, m) = setup(30, 0.1);
        for &theta in &[0.2, 1.0, 3.0] {
            let eps = 1e-6;
            let fd = (h_closed(&pr, &m, theta + eps) - h_closed(&pr, &m, theta - eps)) / (2.0 * eps);
            let exact = log_h_prime(&pr, &m, theta).exp();
            assert!((fd - exact).abs() < 1e-6 * exact);
        }
    }
}
