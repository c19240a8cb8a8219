//! Analytic tail and MGF bounds for the standardized isolated-vertex count
//! `W = (Y-μ)/σ`.
//!
//! Everything is evaluated as a natural log. Linear probabilities are only
//! formed by [`BoundPoint::bound`], which clips to `[0, 1]`.

mod chernoff;
mod corollary;
mod gamma;
mod h;
mod normal;
pub mod quadrature;
mod raic;

use serde::Serialize;

pub use chernoff::{
    chernoff_right, left_tail_bound, log_negative_theta_mgf_bound, negative_theta_mgf_bound,
    piecewise_right,
};
pub use corollary::{corollary_k, CorollaryResult, CorollaryRow};
pub use gamma::{gamma_log, gamma_log_via_degree_mgf, DegreeMgf};
pub use h::{h_closed, h_quadrature, log_h_prime};
pub use normal::{log_normal_sf, normal_sf};
pub use raic::{raic_bound, raic_terms, RaicTerms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `P(W ≥ t)`
    Right,
    /// `P(W ≤ -t)`
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Chernoff,
    Piecewise,
    Left,
    Corollary,
    Raic,
}

impl Method {
    pub fn side(&self) -> Side {
        match self {
            Method::Left => Side::Left,
            _ => Side::Right,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Chernoff => "chernoff",
            Method::Piecewise => "piecewise",
            Method::Left => "left",
            Method::Corollary => "corollary",
            Method::Raic => "raic",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One bound evaluated at a standardized deviation `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPoint {
    pub t: f64,
    /// Natural log of the bound; may be positive (a vacuous bound).
    pub log_bound: f64,
    /// The optimizing or chosen `θ`, where the method has one.
    pub theta_star: Option<f64>,
    pub method: Method,
}

impl BoundPoint {
    pub(crate) fn new(t: f64, log_bound: f64, theta_star: Option<f64>, method: Method) -> Self {
        debug_assert!(!log_bound.is_nan(), "{method} bound is NaN at t = {t}");
        // Saturate instead of carrying an infinity.
        let log_bound = log_bound.min(f64::MAX);
        Self {
            t,
            log_bound,
            theta_star,
            method,
        }
    }

    /// The bound as a probability, clipped to `[0, 1]`.
    pub fn bound(&self) -> f64 {
        self.log_bound.min(0.0).exp()
    }

    /// True when the raw bound exceeds one.
    pub fn clipped(&self) -> bool {
        self.log_bound > 0.0
    }
}
