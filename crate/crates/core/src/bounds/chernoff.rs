use crate::error::{Error, Result};
use crate::model::{Moments, Params};

use super::gamma::gamma_log;
use super::h::{h_closed, h_quadrature, log_h_prime};
use super::{BoundPoint, Method};

const THETA_REL_TOL: f64 = 1e-12;
const MAX_BRACKET_DOUBLINGS: usize = 2_000;
const MAX_BISECTIONS: usize = 400;

/// `inf_{θ≥0} exp(-θt + H(θ))`.
///
/// `H` is convex with `H'(θ) = (μ/2σ²) θ γ_{θ/σ}` increasing from 0 without
/// bound, so the minimizer is the root of `H'(θ) = t`. It is bracketed by
/// doubling and refined by bisection, comparing in log space.
pub fn chernoff_right(params: &Params, moments: &Moments, t: f64) -> BoundPoint {
    if t <= 0.0 {
        return BoundPoint::new(t.max(0.0), 0.0, Some(0.0), Method::Chernoff);
    }
    let target = t.ln();
    let below = |theta: f64| log_h_prime(params, moments, theta) < target;

    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..MAX_BRACKET_DOUBLINGS {
        if !below(hi) {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= THETA_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let mut h = h_closed(params, moments, theta);
    if !h.is_finite() {
        h = h_quadrature(params, moments, theta).unwrap_or_else(|e| match e {
            Error::Quadrature { estimate, .. } => estimate,
            _ => f64::INFINITY,
        });
    }
    BoundPoint::new(t, -theta * t + h, Some(theta), Method::Chernoff)
}

/// The Chernoff bound with `H` replaced by its quadratic majorant on
/// `[0, θ₀]`, `H(θ) ≤ μ γ_{θ₀/σ} θ² / (4σ²)`:
///
/// * `exp(-t²σ² / (μ γ_{θ₀/σ}))` for `t ≤ θ₀ μ γ_{θ₀/σ} / (2σ²)`,
/// * `exp(-θ₀ t + μ γ_{θ₀/σ} θ₀² / (4σ²))` beyond.
pub fn piecewise_right(
    params: &Params,
    moments: &Moments,
    t: f64,
    theta0: f64,
) -> Result<BoundPoint> {
    if !(theta0 > 0.0 && theta0.is_finite()) {
        return Err(Error::Param(format!("theta0 must be > 0 (got {theta0})")));
    }
    let log_gamma = gamma_log(params, theta0 / moments.sigma);
    // μγ/σ² in log space
    let log_curv = moments.log_mu + log_gamma - moments.log_sigma2;
    let log_threshold = theta0.ln() + log_curv - std::f64::consts::LN_2;
    let t = t.max(0.0);
    let point = if t == 0.0 || t.ln() <= log_threshold {
        let log_bound = -t * t * (-log_curv).exp();
        let theta = 2.0 * t * (-log_curv).exp();
        BoundPoint::new(t, log_bound, Some(theta), Method::Piecewise)
    } else {
        let log_bound = -theta0 * t + log_curv.exp() * theta0 * theta0 / 4.0;
        BoundPoint::new(t, log_bound, Some(theta0), Method::Piecewise)
    };
    Ok(point)
}

/// `P(W ≤ -t) ≤ exp(-t²σ²/(4μ))`.
pub fn left_tail_bound(moments: &Moments, t: f64) -> BoundPoint {
    let t = t.max(0.0);
    let log_bound = -t * t * (moments.log_sigma2 - moments.log_mu).exp() / 4.0;
    BoundPoint::new(t, log_bound, None, Method::Left)
}

/// `ln` of the MGF majorant `exp(μθ²/σ²)`, certified for `θ ≤ 0`.
pub fn log_negative_theta_mgf_bound(moments: &Moments, theta: f64) -> Result<f64> {
    if theta > 0.0 {
        return Err(Error::Param(format!(
            "the negative-θ MGF bound needs θ ≤ 0 (got {theta})"
        )));
    }
    Ok(theta * theta * (moments.log_mu - moments.log_sigma2).exp())
}

pub fn negative_theta_mgf_bound(moments: &Moments, theta: f64) -> Result<f64> {
    log_negative_theta_mgf_bound(moments, theta).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(n: usize, p: f64) -> (Params, Moments) {
        let pr = Params::new(n, p).unwrap();
        (pr, pr.moments())
    }

    #[test]
    fn zero_deviation_is_trivial() {
        let (pr, m) = setup(3, 0.5);
        let b = chernoff_right(&pr, &m, 0.0);
        assert_eq!((b.theta_star, b.bound()), (Some(0.0), 1.0));
        assert_eq!(piecewise_right(&pr, &m, 0.0, m.sigma).unwrap().bound(), 1.0);
        assert_eq!(left_tail_bound(&m, 0.0).bound(), 1.0);
        assert_eq!(negative_theta_mgf_bound(&m, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn stationarity_at_the_optimum() {
        let (pr, m) = setup(200, 0.01);
        for &t in &[0.3, 1.0, 2.5, 6.0] {
            let b = chernoff_right(&pr, &m, t);
            let theta = b.theta_star.unwrap();
            let hp = log_h_prime(&pr, &m, theta).exp();
            assert!((hp - t).abs() < 1e-9 * t, "t={t}: H'={hp}");
        }
    }

    #[test]
    fn three_vertices_against_grid_search() {
        let (pr, m) = setup(3, 0.5);
        let b = chernoff_right(&pr, &m, 1.0);
        let mut best = f64::INFINITY;
        let mut theta = 0.0;
        while theta <= 50.0 {
            best = best.min(-theta + h_closed(&pr, &m, theta));
            theta += 1e-4;
        }
        assert!((b.log_bound.exp() - best.exp()).abs() <= 1e-6 * best.exp());
    }

    #[test]
    fn two_vertices_dominates_exact_tail() {
        let (pr, m) = setup(2, 0.5);
        assert!(chernoff_right(&pr, &m, 1.0).bound() >= 0.5);
    }

    #[test]
    fn piecewise_is_continuous_at_threshold() {
        let (pr, m) = setup(50, 0.04);
        for &theta0 in &[0.5 * m.sigma, m.sigma, 3.0] {
            let g = gamma_log(&pr, theta0 / m.sigma).exp();
            let t_star = theta0 * m.mu * g / (2.0 * m.sigma2);
            let below = piecewise_right(&pr, &m, t_star * (1.0 - 1e-12), theta0).unwrap();
            let above = piecewise_right(&pr, &m, t_star * (1.0 + 1e-12), theta0).unwrap();
            assert!((below.log_bound - above.log_bound).abs() < 1e-9 * below.log_bound.abs());
            assert_eq!(above.theta_star, Some(theta0));
        }
    }

    #[test]
    fn piecewise_dominates_chernoff() {
        for &(n, p) in &[(4, 0.3), (60, 0.03), (1000, 0.001)] {
            let (pr, m) = setup(n, p);
            for &theta0 in &[0.5 * m.sigma, m.sigma, 2.0 * m.sigma, 0.1] {
                for i in 0..40 {
                    let t = 0.2 * i as f64;
                    let c = chernoff_right(&pr, &m, t).log_bound;
                    let pw = piecewise_right(&pr, &m, t, theta0).unwrap().log_bound;
                    assert!(c <= pw + 1e-12 * pw.abs().max(1.0), "n={n} t={t} θ₀={theta0}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_positive_theta0() {
        let (pr, m) = setup(5, 0.3);
        assert!(piecewise_right(&pr, &m, 1.0, 0.0).is_err());
        assert!(piecewise_right(&pr, &m, 1.0, -1.0).is_err());
    }

    #[test]
    fn left_tail_arithmetic() {
        let (_, m) = setup(3, 0.5);
        let b = left_tail_bound(&m, 1.0);
        assert!((b.bound() - (-0.9375f64 / 3.0).exp()).abs() < 1e-15);
        assert!((b.bound() - 0.73162).abs() < 1e-5);
    }

    #[test]
    fn negative_theta_two_point() {
        let (_, m) = setup(2, 0.5);
        let bound = negative_theta_mgf_bound(&m, -1.0).unwrap();
        assert!((bound - std::f64::consts::E).abs() < 1e-15);
        assert!(f64::cosh(1.0) <= bound);
        assert!(negative_theta_mgf_bound(&m, 0.5).is_err());
    }

    #[test]
    fn monotone_in_t() {
        let (pr, m) = setup(100, 0.02);
        let mut prev = [f64::INFINITY; 3];
        for i in 0..60 {
            let t = 0.1 * i as f64;
            let now = [
                chernoff_right(&pr, &m, t).log_bound,
                piecewise_right(&pr, &m, t, m.sigma).unwrap().log_bound,
                left_tail_bound(&m, t).log_bound,
            ];
            for k in 0..3 {
                assert!(now[k] <= prev[k] + 1e-12);
            }
            prev = now;
        }
    }
}
